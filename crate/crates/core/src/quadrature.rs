//! Composite Gauss-Legendre and Simpson rules used by the kernel diagnostics.

const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Integrate `f` over `[lo, hi]` with `panels` equal 8-point Gauss-Legendre panels.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, panels: usize) -> f64 {
    let panels = panels.max(1);
    let h = (hi - lo) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = lo + (p as f64 + 0.5) * h;
        let half = 0.5 * h;
        let mut acc = 0.0;
        for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()) {
            acc += w * (f(mid - half * x) + f(mid + half * x));
        }
        total += acc * half;
    }
    total
}

/// Composite Simpson over uniformly spaced samples; an odd interval count
/// closes with the 3/8 rule on the last three intervals.
pub fn simpson(samples: &[f64], h: f64) -> f64 {
    let n = samples.len();
    assert!(n >= 3, "simpson needs at least two intervals");
    let intervals = n - 1;
    let (simpson_end, tail) = if intervals.is_multiple_of(2) {
        (intervals, 0.0)
    } else {
        let e = intervals - 3;
        let t = 3.0 * h / 8.0
            * (samples[e] + 3.0 * samples[e + 1] + 3.0 * samples[e + 2] + samples[e + 3]);
        (e, t)
    };
    let mut acc = 0.0;
    let mut i = 0;
    while i + 2 <= simpson_end {
        acc += samples[i] + 4.0 * samples[i + 1] + samples[i + 2];
        i += 2;
    }
    acc * h / 3.0 + tail
}
