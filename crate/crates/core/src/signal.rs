//! Motion-signal conditioning: variance trimming, aggregation, Butterworth
//! band-pass (zero phase), z-normalization, peak detection and rate readout.
//!
//! The band-pass is designed in zero-pole-gain form (analog Butterworth
//! prototype, low-pass to band-pass transform, bilinear transform), executed
//! as cascaded biquads, and applied forward-backward with odd-reflection
//! padding and steady-state initial conditions so peak timing is preserved.

use num_complex::Complex64;

use crate::error::Error;
use crate::params::SignalParams;
use crate::tracking::TrackSeries;
use crate::Result;

/// Uniformly sampled 1D motion signal.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionSignal {
    pub values: Vec<f64>,
    /// Sample rate in Hz (the video frame rate).
    pub fs: f64,
}

impl MotionSignal {
    pub fn new(values: Vec<f64>, fs: f64) -> MotionSignal {
        assert!(fs > 0.0, "sample rate must be positive");
        assert!(values.len() >= 2, "signal needs at least 2 samples");
        MotionSignal { values, fs }
    }

    pub fn duration_s(&self) -> f64 {
        self.values.len() as f64 / self.fs
    }
}

/// Band-pass description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandpassSpec {
    pub low_hz: f64,
    pub high_hz: f64,
    /// Butterworth prototype order; the band-pass has twice as many poles.
    pub order: usize,
}

impl Default for BandpassSpec {
    fn default() -> Self {
        BandpassSpec {
            low_hz: 0.1,
            high_hz: 0.45,
            order: 4,
        }
    }
}

impl From<SignalParams> for BandpassSpec {
    fn from(p: SignalParams) -> BandpassSpec {
        BandpassSpec {
            low_hz: p.low_hz,
            high_hz: p.high_hz,
            order: p.order,
        }
    }
}

/// Peak picking settings; prominence is measured in z-units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakParams {
    /// Minimum sample spacing between kept peaks.
    pub min_distance: usize,
    pub min_prominence: f64,
}

impl PeakParams {
    /// Defaults derived from the sample rate: peaks of a band-limited signal
    /// cannot repeat faster than the high cutoff allows.
    pub fn for_rate(fs: f64, signal: &SignalParams) -> PeakParams {
        PeakParams {
            min_distance: ((fs / signal.high_hz).floor() as usize).max(1),
            min_prominence: signal.min_prominence,
        }
    }
}

/// Drop the `fraction` lowest- and highest-variance tracks.
///
/// Tracks are ranked by the population variance of their y-series;
/// `floor(fraction * N)` are removed from each end and the middle band is
/// returned in original order. If the middle band were ever empty the single
/// median-variance track is kept.
pub fn variance_trim(tracks: &[TrackSeries], fraction: f64) -> Result<Vec<TrackSeries>> {
    assert!(
        fraction > 0.0 && fraction < 0.5,
        "trim fraction must lie in (0, 0.5)"
    );
    if tracks.is_empty() {
        return Err(Error::NoTracks);
    }
    let variance = |ys: &[f64]| -> f64 {
        let mean = ys.iter().sum::<f64>() / ys.len() as f64;
        ys.iter().map(|&y| (y - mean) * (y - mean)).sum::<f64>() / ys.len() as f64
    };
    let mut order: Vec<usize> = (0..tracks.len()).collect();
    let vars: Vec<f64> = tracks.iter().map(|t| variance(&t.y)).collect();
    order.sort_by(|&a, &b| vars[a].partial_cmp(&vars[b]).unwrap().then(a.cmp(&b)));

    let drop = (fraction * tracks.len() as f64).floor() as usize;
    let mut keep: Vec<usize> = if 2 * drop < order.len() {
        order[drop..order.len() - drop].to_vec()
    } else {
        vec![order[order.len() / 2]]
    };
    keep.sort_unstable();
    Ok(keep.into_iter().map(|i| tracks[i].clone()).collect())
}

/// Mean per-frame vertical displacement across tracks, baseline-removed:
/// `value[t] = mean_i(y_i[t] - y_i[0])`.
pub fn aggregate_motion(tracks: &[TrackSeries], fs: f64) -> Result<MotionSignal> {
    if tracks.is_empty() {
        return Err(Error::NoTracks);
    }
    let len = tracks[0].len();
    for t in tracks {
        if t.len() != len {
            return Err(Error::LengthMismatch { a: len, b: t.len() });
        }
    }
    let inv_n = 1.0 / tracks.len() as f64;
    let values = (0..len)
        .map(|t| tracks.iter().map(|tr| tr.y[t] - tr.y[0]).sum::<f64>() * inv_n)
        .collect();
    Ok(MotionSignal::new(values, fs))
}

// ---------------------------------------------------------------------------
// Butterworth band-pass design
// ---------------------------------------------------------------------------

/// One second-order section, denominator normalized (`a0 = 1`).
#[derive(Debug, Clone, Copy)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 2],
}

impl Biquad {
    fn dc_gain(&self) -> f64 {
        (self.b[0] + self.b[1] + self.b[2]) / (1.0 + self.a[0] + self.a[1])
    }

    /// Initial state (direct form II transposed) for a unit-step steady state.
    fn step_zi(&self) -> [f64; 2] {
        let g = self.dc_gain();
        [
            self.b[1] + self.b[2] - (self.a[0] + self.a[1]) * g,
            self.b[2] - self.a[1] * g,
        ]
    }
}

/// Design a digital Butterworth band-pass as second-order sections.
pub fn butter_bandpass_sos(order: usize, low_hz: f64, high_hz: f64, fs: f64) -> Vec<Biquad> {
    assert!(order >= 1);
    assert!(0.0 < low_hz && low_hz < high_hz && high_hz < fs / 2.0);

    // analog low-pass prototype poles on the unit circle, left half-plane
    let n = order as i32;
    let prototype: Vec<Complex64> = (0..order)
        .map(|k| {
            let theta = std::f64::consts::PI * (2 * k as i32 + n + 1) as f64 / (2 * n) as f64;
            Complex64::new(theta.cos(), theta.sin())
        })
        .collect();

    // pre-warp cutoffs (internal rate 2 Hz, frequencies relative to Nyquist)
    let warp = |hz: f64| 4.0 * (std::f64::consts::PI * hz / fs).tan();
    let (w1, w2) = (warp(low_hz), warp(high_hz));
    let bw = w2 - w1;
    let wo = (w1 * w2).sqrt();

    // low-pass -> band-pass: each pole splits in two; N zeros appear at s=0
    let mut analog_poles = Vec::with_capacity(2 * order);
    for &p in &prototype {
        let scaled = p * (bw / 2.0);
        let root = (scaled * scaled - Complex64::new(wo * wo, 0.0)).sqrt();
        analog_poles.push(scaled + root);
        analog_poles.push(scaled - root);
    }
    let gain_analog = bw.powi(n);

    // bilinear transform at fs = 2: s -> (4 + s) / (4 - s)
    let fs2 = Complex64::new(4.0, 0.0);
    let digital_poles: Vec<Complex64> = analog_poles
        .iter()
        .map(|&p| (fs2 + p) / (fs2 - p))
        .collect();
    // zeros: N at z = +1 (from s = 0), N at z = -1 (from s = infinity)
    let num = fs2.powi(n); // prod(fs2 - s_zero) over the N zeros at s=0
    let den: Complex64 = analog_poles
        .iter()
        .fold(Complex64::new(1.0, 0.0), |acc, &p| acc * (fs2 - p));
    let gain = gain_analog * (num / den).re;
    debug_assert!(gain > 0.0);

    // group poles into conjugate pairs (plus real pairs for odd orders)
    let mut upper: Vec<Complex64> = digital_poles
        .iter()
        .copied()
        .filter(|p| p.im > 1e-12)
        .collect();
    let mut reals: Vec<f64> = digital_poles
        .iter()
        .filter(|p| p.im.abs() <= 1e-12)
        .map(|p| p.re)
        .collect();
    upper.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
    reals.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap());
    assert_eq!(upper.len() * 2 + reals.len(), 2 * order);
    assert_eq!(reals.len() % 2, 0);

    let mut denominators: Vec<[f64; 2]> =
        upper.iter().map(|p| [-2.0 * p.re, p.norm_sqr()]).collect();
    denominators.extend(reals.chunks_exact(2).map(|r| [-(r[0] + r[1]), r[0] * r[1]]));

    // each section takes one zero pair (z-1)(z+1) = z^2 - 1 and an even
    // share of the gain
    let g = gain.powf(1.0 / order as f64);
    denominators
        .into_iter()
        .map(|a| Biquad { b: [g, 0.0, -g], a })
        .collect()
}

/// Run the cascade once over `data` (direct form II transposed), with each
/// section initialized to its steady state for a constant input `x0`.
fn sosfilt(sos: &[Biquad], data: &mut [f64], x0: f64) {
    let mut scale = x0;
    for sec in sos {
        let zi = sec.step_zi();
        let mut s1 = zi[0] * scale;
        let mut s2 = zi[1] * scale;
        for v in data.iter_mut() {
            let x = *v;
            let y = sec.b[0] * x + s1;
            s1 = sec.b[1] * x - sec.a[0] * y + s2;
            s2 = sec.b[2] * x - sec.a[1] * y;
            *v = y;
        }
        scale *= sec.dc_gain();
    }
}

/// Forward-backward (zero-phase) cascade filtering with odd-reflection padding.
pub fn sosfiltfilt(sos: &[Biquad], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let padlen = (3 * (2 * sos.len() + 1)).min(n.saturating_sub(1));

    let mut ext = Vec::with_capacity(n + 2 * padlen);
    for i in (1..=padlen).rev() {
        ext.push(2.0 * x[0] - x[i]);
    }
    ext.extend_from_slice(x);
    for i in (1..=padlen).rev() {
        ext.push(2.0 * x[n - 1] - x[n - 1 - i]);
    }

    let first = ext[0];
    sosfilt(sos, &mut ext, first);
    ext.reverse();
    let first = ext[0];
    sosfilt(sos, &mut ext, first);
    ext.reverse();

    ext[padlen..padlen + n].to_vec()
}

/// Zero-phase Butterworth band-pass of `sig`.
pub fn bandpass(sig: &MotionSignal, spec: &BandpassSpec) -> Result<MotionSignal> {
    if !(spec.low_hz > 0.0 && spec.low_hz < spec.high_hz && spec.high_hz < sig.fs / 2.0) {
        return Err(Error::BadCutoff {
            low_hz: spec.low_hz,
            high_hz: spec.high_hz,
            fs: sig.fs,
        });
    }
    let sos = butter_bandpass_sos(spec.order, spec.low_hz, spec.high_hz, sig.fs);
    Ok(MotionSignal::new(sosfiltfilt(&sos, &sig.values), sig.fs))
}

/// Shift to zero mean and unit population standard deviation.
pub fn z_normalize(sig: &MotionSignal) -> Result<MotionSignal> {
    let n = sig.values.len() as f64;
    let mean = sig.values.iter().sum::<f64>() / n;
    let var = sig
        .values
        .iter()
        .map(|&v| (v - mean) * (v - mean))
        .sum::<f64>()
        / n;
    let std = var.sqrt();
    if std == 0.0 {
        return Err(Error::ConstantSignal);
    }
    let values = sig.values.iter().map(|&v| (v - mean) / std).collect();
    Ok(MotionSignal::new(values, sig.fs))
}

/// Topographic prominence of the peak at `i`: height above the higher of the
/// two valley floors separating it from taller terrain (or the signal ends).
fn prominence(values: &[f64], i: usize) -> f64 {
    let h = values[i];
    let mut left_min = h;
    for &v in values[..i].iter().rev() {
        if v > h {
            break;
        }
        left_min = left_min.min(v);
    }
    let mut right_min = h;
    for &v in &values[i + 1..] {
        if v > h {
            break;
        }
        right_min = right_min.min(v);
    }
    h - left_min.max(right_min)
}

/// Indices of local maxima, prominence-gated and distance-thinned.
///
/// A plateau of equal values counts as a single candidate at its left edge.
/// Candidates below `min_prominence` are dropped, then peaks closer than
/// `min_distance` samples to a taller kept peak are removed greedily
/// (ties keep the lower index). Endpoints are never peaks.
pub fn detect_peaks(sig: &MotionSignal, params: &PeakParams) -> Vec<usize> {
    let v = &sig.values;
    let n = v.len();
    let mut candidates: Vec<usize> = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if v[i] > v[i - 1] {
            // extend across any plateau
            let mut j = i;
            while j + 1 < n && v[j + 1] == v[i] {
                j += 1;
            }
            if j + 1 < n && v[j + 1] < v[i] {
                candidates.push(i);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }

    candidates.retain(|&i| prominence(v, i) >= params.min_prominence);

    // keep taller peaks first; suppress anything within min_distance of a keeper
    let mut by_height = candidates.clone();
    by_height.sort_by(|&a, &b| v[b].partial_cmp(&v[a]).unwrap().then(a.cmp(&b)));
    let mut kept: Vec<usize> = Vec::new();
    for idx in by_height {
        if kept.iter().all(|&k| idx.abs_diff(k) >= params.min_distance) {
            kept.push(idx);
        }
    }
    kept.sort_unstable();
    kept
}

/// Breaths per minute from a peak count over `duration_s` seconds.
pub fn respiration_rate(peaks: &[usize], duration_s: f64) -> f64 {
    assert!(duration_s > 0.0, "duration must be positive");
    peaks.len() as f64 * 60.0 / duration_s
}
