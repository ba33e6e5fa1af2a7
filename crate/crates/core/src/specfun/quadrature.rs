//! Globally adaptive Gauss–Kronrod (10/21 point) quadrature.
//!
//! Semi-infinite ranges are mapped onto `[0, 1)` with
//! `x = lower + scale·u/(1 − u)` before subdividing. Integrands decaying
//! slower than `x⁻²` become singular at `u = 1` and converge slowly; the
//! error estimate is then optimistic.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::SpecfunError;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_417_004_660,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Number of equal pieces the range is cut into before adaptive refinement.
const INITIAL_PIECES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    fn validate(&self) -> Result<(), SpecfunError> {
        if !(self.rel_tol > 0.0) {
            return Err(SpecfunError::InvalidArgument {
                what: "rel_tol must be > 0",
                value: self.rel_tol,
            });
        }
        if !(self.abs_tol >= 0.0) {
            return Err(SpecfunError::InvalidArgument {
                what: "abs_tol must be >= 0",
                value: self.abs_tol,
            });
        }
        if self.max_subdivisions < 1 {
            return Err(SpecfunError::InvalidArgument {
                what: "max_subdivisions must be >= 1",
                value: self.max_subdivisions as f64,
            });
        }
        Ok(())
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// Sum of per-interval |Kronrod − Gauss| differences.
    pub abs_error: f64,
    pub intervals: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn kronrod21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment, SpecfunError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(SpecfunError::NonFiniteIntegrand { x, value: y })
        }
    };
    let fc = eval(center)?;
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    for i in 0..10 {
        let dx = half * XGK[i];
        let pair = eval(center - dx)? + eval(center + dx)?;
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    Ok(Segment {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    })
}

/// Adaptive integral of `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<Integral, SpecfunError> {
    spec.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(SpecfunError::InvalidArgument {
            what: "finite integration limits required",
            value: if a.is_finite() { b } else { a },
        });
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            abs_error: 0.0,
            intervals: 0,
            evaluations: 0,
        });
    }

    let pieces = INITIAL_PIECES.min(spec.max_subdivisions);
    let width = (b - a) / pieces as f64;
    let mut heap = BinaryHeap::with_capacity(spec.max_subdivisions + 1);
    let mut evaluations = 0;
    for i in 0..pieces {
        let lo = a + width * i as f64;
        let hi = if i + 1 == pieces { b } else { lo + width };
        heap.push(kronrod21(&f, lo, hi)?);
        evaluations += 21;
    }

    loop {
        let (value, error) = heap
            .iter()
            .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
        if error <= spec.abs_tol.max(spec.rel_tol * value.abs()) {
            return Ok(Integral {
                value,
                abs_error: error,
                intervals: heap.len(),
                evaluations,
            });
        }
        if heap.len() >= spec.max_subdivisions {
            return Err(SpecfunError::QuadratureNotConverged {
                subdivisions: heap.len(),
                estimate: value,
                abs_error: error,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            return Err(SpecfunError::QuadratureNotConverged {
                subdivisions: heap.len() + 1,
                estimate: value,
                abs_error: error,
            });
        }
        heap.push(kronrod21(&f, worst.a, mid)?);
        heap.push(kronrod21(&f, mid, worst.b)?);
        evaluations += 42;
    }
}

/// Adaptive integral of `f` over `[lower, ∞)`, with the characteristic
/// length `scale` placed at the centre of the mapped interval.
pub fn integrate_semi_infinite_scaled<F: Fn(f64) -> f64>(
    f: F,
    lower: f64,
    scale: f64,
    spec: &QuadratureSpec,
) -> Result<Integral, SpecfunError> {
    if !lower.is_finite() {
        return Err(SpecfunError::InvalidArgument {
            what: "lower limit must be finite",
            value: lower,
        });
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(SpecfunError::InvalidArgument {
            what: "scale must be positive",
            value: scale,
        });
    }
    let mapped = |u: f64| {
        let one_minus = 1.0 - u;
        if one_minus <= 0.0 {
            return 0.0;
        }
        let x = lower + scale * u / one_minus;
        let y = f(x);
        if y == 0.0 {
            0.0
        } else {
            y * scale / (one_minus * one_minus)
        }
    };
    integrate(mapped, 0.0, 1.0, spec)
}

/// Adaptive integral of `f` over `[lower, ∞)`.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    lower: f64,
    spec: &QuadratureSpec,
) -> Result<Integral, SpecfunError> {
    integrate_semi_infinite_scaled(f, lower, 1.0, spec)
}
