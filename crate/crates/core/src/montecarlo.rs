//! Monte-Carlo model of the coincidence counting chain.
//!
//! Pair events arrive as a Poisson process. With probability equal to the
//! normalized interference rate a pair yields one detection in each
//! detector; otherwise both photons leave through the same beamsplitter
//! port and produce a single click on one detector. Each detector also sees
//! an independent Poisson stream of excess singles. D1 starts and D2
//! (delayed by `stop_delay_ns`) stops a time-to-amplitude converter; every
//! stop within `tac_range_ns` of a start is histogrammed.
//!
//! Randomness comes from ChaCha8, seeded by `rng_seed` with one stream per
//! time shard, so results depend only on the seed and the shard plan.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::interferometry::{subtract_accidentals_per_sample, visibility, InterferencePattern, PatternMode, Sign};
use crate::{Error, Result};

pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha), stream = shard index";
/// Largest number of expected events a single simulation may generate.
pub const MAX_EXPECTED_EVENTS: f64 = 1e9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CountingConfig {
    /// Pair events per second reaching both apertures.
    pub pair_rate: f64,
    /// Excess (partnerless) singles per second on D1 and D2.
    pub singles_excess_rate: [f64; 2],
    pub window_width_ns: f64,
    pub accidental_offset_ns: f64,
    pub duration_s: f64,
    pub jitter_sigma_ns: f64,
    pub rng_seed: u64,
    pub shards: usize,
    pub stop_delay_ns: f64,
    pub tac_range_ns: f64,
    pub bin_width_ns: f64,
}

impl Default for CountingConfig {
    fn default() -> Self {
        Self {
            pair_rate: 1e5,
            singles_excess_rate: [0.0, 0.0],
            window_width_ns: 3.0,
            accidental_offset_ns: 10.0,
            duration_s: 1.0,
            jitter_sigma_ns: 0.3,
            rng_seed: 0,
            shards: 16,
            stop_delay_ns: 20.0,
            tac_range_ns: 50.0,
            bin_width_ns: 0.1,
        }
    }
}

impl CountingConfig {
    pub fn validate(&self) -> Result<()> {
        let rates_ok = self.pair_rate >= 0.0
            && self.pair_rate.is_finite()
            && self.singles_excess_rate.iter().all(|r| *r >= 0.0 && r.is_finite());
        if !rates_ok {
            return Err(Error::Config("counting rates must be finite and ≥ 0".into()));
        }
        if !(self.window_width_ns > 0.0) {
            return Err(Error::Config(format!("window_width_ns must be positive, got {}", self.window_width_ns)));
        }
        if !(self.accidental_offset_ns > self.window_width_ns) {
            return Err(Error::Config(format!(
                "accidental_offset_ns ({}) must exceed window_width_ns ({})",
                self.accidental_offset_ns, self.window_width_ns
            )));
        }
        if !(self.duration_s > 0.0 && self.duration_s.is_finite()) {
            return Err(Error::Config(format!("duration_s must be positive, got {}", self.duration_s)));
        }
        if !(self.jitter_sigma_ns >= 0.0) {
            return Err(Error::Config(format!("jitter_sigma_ns must be ≥ 0, got {}", self.jitter_sigma_ns)));
        }
        if self.shards == 0 {
            return Err(Error::Config("shards must be at least 1".into()));
        }
        if !(self.bin_width_ns > 0.0 && self.tac_range_ns > self.bin_width_ns) {
            return Err(Error::Config(format!(
                "tac_range_ns ({}) must exceed bin_width_ns ({}) > 0",
                self.tac_range_ns, self.bin_width_ns
            )));
        }
        if !(self.stop_delay_ns >= 0.0 && self.stop_delay_ns < self.tac_range_ns) {
            return Err(Error::Config(format!(
                "stop_delay_ns ({}) must lie inside the TAC range",
                self.stop_delay_ns
            )));
        }
        Ok(())
    }

    /// Expected total singles rate on each detector for interference rate `r`.
    pub fn singles_rates(&self, r: f64) -> [f64; 2] {
        let from_pairs = self.pair_rate * (1.0 + r) / 2.0;
        [self.singles_excess_rate[0] + from_pairs, self.singles_excess_rate[1] + from_pairs]
    }

    /// Expected accidental coincidences `R₁R₂WT` in one window.
    pub fn expected_accidentals(&self, r: f64) -> f64 {
        let [r1, r2] = self.singles_rates(r);
        r1 * r2 * self.window_width_ns * 1e-9 * self.duration_s
    }
}

/// Start-stop time-difference histogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MCAHistogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub total_starts: u64,
    pub total_stops: u64,
    pub rng_algorithm: String,
    pub rng_seed: u64,
    pub shards: usize,
}

impl MCAHistogram {
    pub fn bin_width(&self) -> f64 {
        self.bin_edges[1] - self.bin_edges[0]
    }

    pub fn total_counts(&self) -> u64 {
        self.counts.iter().sum()
    }
}

fn poisson_count(rng: &mut ChaCha8Rng, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("positive mean").sample(rng) as u64
}

fn simulate_shard(cfg: &CountingConfig, r: f64, shard: usize, bins: usize) -> (Vec<u64>, u64, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    rng.set_stream(shard as u64);
    let span_ns = cfg.duration_s * 1e9 / cfg.shards as f64;
    let t0 = shard as f64 * span_ns;
    let jitter = Normal::new(0.0, cfg.jitter_sigma_ns).expect("validated sigma");

    let mut starts = Vec::new();
    let mut stops = Vec::new();
    let pairs = poisson_count(&mut rng, cfg.pair_rate * span_ns * 1e-9);
    for _ in 0..pairs {
        let t = t0 + rng.random::<f64>() * span_ns;
        if rng.random::<f64>() < r {
            starts.push(t + jitter.sample(&mut rng));
            stops.push(t + cfg.stop_delay_ns + jitter.sample(&mut rng));
        } else if rng.random::<bool>() {
            starts.push(t + jitter.sample(&mut rng));
        } else {
            stops.push(t + cfg.stop_delay_ns + jitter.sample(&mut rng));
        }
    }
    for (det, &rate) in cfg.singles_excess_rate.iter().enumerate() {
        let n = poisson_count(&mut rng, rate * span_ns * 1e-9);
        for _ in 0..n {
            let t = t0 + rng.random::<f64>() * span_ns;
            if det == 0 {
                starts.push(t);
            } else {
                stops.push(t + cfg.stop_delay_ns);
            }
        }
    }
    starts.sort_by(f64::total_cmp);
    stops.sort_by(f64::total_cmp);

    let mut counts = vec![0u64; bins];
    let mut first = 0;
    for &s in &starts {
        while first < stops.len() && stops[first] < s {
            first += 1;
        }
        for &stop in &stops[first..] {
            let dt = stop - s;
            if dt >= cfg.tac_range_ns {
                break;
            }
            let b = (dt / cfg.bin_width_ns) as usize;
            if b < bins {
                counts[b] += 1;
            }
        }
    }
    (counts, starts.len() as u64, stops.len() as u64)
}

/// Simulates the start-stop histogram at interference rate `r ∈ [0, 1]`.
pub fn simulate_mca(cfg: &CountingConfig, interference_rate: f64) -> Result<MCAHistogram> {
    cfg.validate()?;
    if !(0.0..=1.0).contains(&interference_rate) {
        return Err(Error::Config(format!("interference rate must lie in [0, 1], got {interference_rate}")));
    }
    let expected = (cfg.pair_rate + cfg.singles_excess_rate.iter().sum::<f64>()) * cfg.duration_s;
    if expected > MAX_EXPECTED_EVENTS {
        return Err(Error::Config(format!(
            "expected {expected:.3e} events exceeds the {MAX_EXPECTED_EVENTS:e} limit; shorten duration_s"
        )));
    }
    let bins = (cfg.tac_range_ns / cfg.bin_width_ns).round() as usize;
    let shards: Vec<(Vec<u64>, u64, u64)> = (0..cfg.shards)
        .into_par_iter()
        .map(|s| simulate_shard(cfg, interference_rate, s, bins))
        .collect();
    let mut counts = vec![0u64; bins];
    let (mut starts, mut stops) = (0, 0);
    for (c, a, b) in shards {
        for (acc, v) in counts.iter_mut().zip(c) {
            *acc += v;
        }
        starts += a;
        stops += b;
    }
    Ok(MCAHistogram {
        bin_edges: (0..=bins).map(|k| k as f64 * cfg.bin_width_ns).collect(),
        counts,
        total_starts: starts,
        total_stops: stops,
        rng_algorithm: RNG_ALGORITHM.into(),
        rng_seed: cfg.rng_seed,
        shards: cfg.shards,
    })
}

/// Window sums around the coincidence peak and at the accidental offset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coincidences {
    /// Counts in the peak window (true plus accidental).
    pub true_counts: u64,
    /// Counts in the offset window.
    pub accidental_counts: u64,
    pub peak_window_start_ns: f64,
    pub accidental_window_start_ns: f64,
}

/// Sum of `counts[start..start + len]`.
pub fn window_sum(counts: &[u64], start: usize, len: usize) -> u64 {
    counts[start..start + len].iter().sum()
}

/// Locates the peak with a window-length moving sum and integrates it and
/// an equal window `accidental_offset_ns` later.
pub fn extract_coincidences(h: &MCAHistogram, window_width_ns: f64, accidental_offset_ns: f64) -> Result<Coincidences> {
    if !(window_width_ns > 0.0) {
        return Err(Error::Config(format!("window_width_ns must be positive, got {window_width_ns}")));
    }
    if accidental_offset_ns < window_width_ns {
        return Err(Error::Config(format!(
            "accidental window at {accidental_offset_ns} ns overlaps the {window_width_ns} ns peak window"
        )));
    }
    let bw = h.bin_width();
    let len = ((window_width_ns / bw).round() as usize).max(1);
    let offset = (accidental_offset_ns / bw).round() as usize;
    let n = h.counts.len();
    if len + offset > n {
        return Err(Error::Config(format!(
            "accidental window ({accidental_offset_ns} ns offset) does not fit in the {:.1} ns histogram",
            n as f64 * bw
        )));
    }
    let mut best = (0usize, window_sum(&h.counts, 0, len));
    let mut running = best.1;
    for i in 1..=(n - len) {
        running = running + h.counts[i + len - 1] - h.counts[i - 1];
        if running > best.1 {
            best = (i, running);
        }
    }
    let peak = best.0;
    let acc = peak + offset;
    if acc + len > n {
        return Err(Error::Config(format!(
            "accidental window at {:.1} ns lies beyond the histogram range ({:.1} ns)",
            (acc + len) as f64 * bw,
            n as f64 * bw
        )));
    }
    Ok(Coincidences {
        true_counts: best.1,
        accidental_counts: window_sum(&h.counts, acc, len),
        peak_window_start_ns: h.bin_edges[peak],
        accidental_window_start_ns: h.bin_edges[acc],
    })
}

/// Dip, peak and far-wing runs of one HOM scan and their visibilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisibilityChain {
    pub dip: Coincidences,
    pub peak: Coincidences,
    pub baseline: Coincidences,
    pub raw_visibility: f64,
    pub corrected_visibility: f64,
}

impl VisibilityChain {
    pub fn true_counts(&self) -> u64 {
        self.peak.true_counts
    }

    pub fn accidental_counts(&self) -> u64 {
        self.peak.accidental_counts
    }
}

fn three_point(rate_center: f64, rate_wing: f64, sign: Sign) -> InterferencePattern {
    InterferencePattern {
        tau: vec![-1.0, 0.0, 1.0],
        rate: vec![rate_wing, rate_center, rate_wing],
        analyzer_deg: match sign {
            Sign::Plus => [45.0, -45.0],
            Sign::Minus => [45.0, 45.0],
        },
        carrier_omega: None,
        mode: PatternMode::HomClosed,
        sign: Some(sign),
        envelope: None,
        delay_offset_fs: 0.0,
        source: "Monte-Carlo counts".into(),
    }
}

/// Simulates the dip (`½(1 − V)`), peak (`½(1 + V)`) and baseline (`½`)
/// delays, then forms raw and accidental-subtracted visibilities. The
/// accidental estimate of each run is its own offset window.
pub fn simulate_visibility_chain(cfg: &CountingConfig, true_visibility: f64) -> Result<VisibilityChain> {
    if !(0.0..=1.0).contains(&true_visibility) {
        return Err(Error::Config(format!("true visibility must lie in [0, 1], got {true_visibility}")));
    }
    let run = |rate: f64, seed_offset: u64| -> Result<Coincidences> {
        let mut c = cfg.clone();
        c.rng_seed = cfg.rng_seed.wrapping_add(seed_offset);
        let h = simulate_mca(&c, rate)?;
        extract_coincidences(&h, cfg.window_width_ns, cfg.accidental_offset_ns)
    };
    let dip = run(0.5 * (1.0 - true_visibility), 0)?;
    let peak = run(0.5 * (1.0 + true_visibility), 1)?;
    let baseline = run(0.5, 2)?;

    let norm = 2.0 * baseline.true_counts.max(1) as f64;
    let rate = |c: &Coincidences| c.true_counts as f64 / norm;
    let raw = visibility(
        &three_point(rate(&dip), rate(&baseline), Sign::Minus),
        &three_point(rate(&peak), rate(&baseline), Sign::Plus),
    )?;

    let level = |c: &Coincidences| c.accidental_counts as f64 / norm;
    let wing = level(&baseline);
    let dip_c = subtract_accidentals_per_sample(
        &three_point(rate(&dip), rate(&baseline), Sign::Minus),
        &[wing, level(&dip), wing],
    )?;
    let peak_c = subtract_accidentals_per_sample(
        &three_point(rate(&peak), rate(&baseline), Sign::Plus),
        &[wing, level(&peak), wing],
    )?;
    let corrected = visibility(&dip_c, &peak_c)?;
    Ok(VisibilityChain { dip, peak, baseline, raw_visibility: raw, corrected_visibility: corrected })
}

/// Expected raw visibility for the counting model (no statistics).
pub fn expected_raw_visibility(cfg: &CountingConfig, true_visibility: f64) -> f64 {
    let coinc = |r: f64| cfg.pair_rate * cfg.duration_s * r + cfg.expected_accidentals(r);
    let (d, p) = (coinc(0.5 * (1.0 - true_visibility)), coinc(0.5 * (1.0 + true_visibility)));
    (p - d) / (p + d)
}

/// Counting configuration for a source whose detected singles on each arm
/// are `pair_rate / pair_fraction`, with the partnerless remainder as excess.
pub fn config_from_pair_fraction(base: &CountingConfig, pair_rate: f64, pair_fraction: f64) -> Result<CountingConfig> {
    if !(pair_fraction > 0.0 && pair_fraction <= 1.0) {
        return Err(Error::Config(format!("pair fraction must lie in (0, 1], got {pair_fraction}")));
    }
    let excess = pair_rate * (1.0 / pair_fraction - 1.0);
    Ok(CountingConfig { pair_rate, singles_excess_rate: [excess, excess], ..base.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> CountingConfig {
        CountingConfig { pair_rate: 2e5, duration_s: 0.05, rng_seed: 7, ..Default::default() }
    }

    #[test]
    fn rejects_bad_config() {
        let mut c = cfg();
        c.accidental_offset_ns = 2.0;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let mut c = cfg();
        c.singles_excess_rate = [-1.0, 0.0];
        assert!(c.validate().is_err());
        assert!(simulate_mca(&cfg(), 1.5).is_err());
    }

    #[test]
    fn overflow_guard() {
        let c = CountingConfig { pair_rate: 1e8, duration_s: 100.0, ..cfg() };
        let err = simulate_mca(&c, 0.5).unwrap_err();
        assert!(err.to_string().contains("limit"));
    }

    #[test]
    fn nothing_to_detect() {
        let h = simulate_mca(&cfg(), 0.0).unwrap();
        let c = extract_coincidences(&h, 3.0, 10.0).unwrap();
        // only ordinary pile-up of pair singles remains
        let expected = cfg().expected_accidentals(0.0);
        assert!((c.accidental_counts as f64) < expected + 5.0 * expected.sqrt() + 5.0);
        assert!((c.true_counts as f64) < expected + 5.0 * expected.sqrt() + 5.0);
    }

    #[test]
    fn flat_floor_window() {
        let edges: Vec<f64> = (0..=500).map(|k| k as f64 * 0.1).collect();
        let mut counts = vec![4u64; 500];
        counts[200] = 10_000;
        let h = MCAHistogram {
            bin_edges: edges,
            counts,
            total_starts: 0,
            total_stops: 0,
            rng_algorithm: RNG_ALGORITHM.into(),
            rng_seed: 0,
            shards: 1,
        };
        let c = extract_coincidences(&h, 3.0, 10.0).unwrap();
        assert_eq!(c.accidental_counts, 4 * 30);
        assert_eq!(c.true_counts, 10_000 + 4 * 29);
        assert!(extract_coincidences(&h, 3.0, 2.0).is_err());
        assert!(extract_coincidences(&h, 3.0, 40.0).is_err());
    }

    #[test]
    fn peak_sits_at_stop_delay() {
        let h = simulate_mca(&cfg(), 1.0).unwrap();
        let c = extract_coincidences(&h, 3.0, 10.0).unwrap();
        assert!((c.peak_window_start_ns + 1.5 - 20.0).abs() < 0.3);
        let n = (cfg().pair_rate * cfg().duration_s) as f64;
        assert!((c.true_counts as f64 - n).abs() < 5.0 * n.sqrt() + 0.005 * n);
    }

    #[test]
    fn config_from_fraction() {
        let c = config_from_pair_fraction(&cfg(), 1e5, 0.25).unwrap();
        assert_eq!(c.singles_excess_rate, [3e5, 3e5]);
        assert!(config_from_pair_fraction(&cfg(), 1e5, 0.0).is_err());
    }
}
