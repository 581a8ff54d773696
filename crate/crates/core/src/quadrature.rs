//! Adaptive Gauss–Kronrod quadrature on finite and infinite intervals, with
//! vector-valued and nested two-dimensional variants.

use thiserror::Error;

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
    0.123_491_976_262_065_851_077_958_109_831_074,
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

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("integrand is not finite at x = {x}")]
    NonFinite { x: f64 },
    #[error("subdivision budget of {limit} exhausted (value {value:e}, error estimate {error:e})")]
    Budget { value: f64, error: f64, limit: usize },
}

/// Tolerances and budget for adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 1e-14, max_subdivisions: 4000 }
    }
}

impl QuadOptions {
    pub fn with_tol(rel_tol: f64, abs_tol: f64) -> Self {
        Self { rel_tol, abs_tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VecQuadResult {
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub evaluations: usize,
}

/// A change of variables from the unit interval onto an integration range.
#[derive(Debug, Clone, Copy)]
enum Map {
    /// x = a + (b−a)(3t² − 2t³); flattens endpoint singularities.
    Cubic { a: f64, b: f64 },
    /// x = a + t/(1−t) on [a, ∞).
    Upper { a: f64 },
    /// x = b − t/(1−t) on (−∞, b].
    Lower { b: f64 },
}

impl Map {
    #[inline]
    fn apply(self, t: f64) -> (f64, f64) {
        match self {
            Map::Cubic { a, b } => {
                let x = a + (b - a) * t * t * (3.0 - 2.0 * t);
                (x, (b - a) * 6.0 * t * (1.0 - t))
            }
            Map::Upper { a } => {
                let u = 1.0 - t;
                (a + t / u, 1.0 / (u * u))
            }
            Map::Lower { b } => {
                let u = 1.0 - t;
                (b - t / u, 1.0 / (u * u))
            }
        }
    }
}

/// Splits [a, b] into pieces that each have a smooth map from [0, 1].
fn pieces(a: f64, b: f64) -> Result<Vec<Map>, QuadError> {
    if a.is_nan() || b.is_nan() || a > b {
        return Err(QuadError::InvalidInterval { a, b });
    }
    if a == b {
        return Ok(Vec::new());
    }
    Ok(match (a.is_finite(), b.is_finite()) {
        (true, true) if b - a > 2.0 => {
            // Long ranges are cut at 0, ±1, ±4, ±16, ... so that a narrow
            // feature near the origin cannot hide between distant nodes.
            let mut pts = vec![a];
            let mut marks = vec![0.0];
            let mut m = 1.0;
            while m < a.abs().max(b.abs()) {
                marks.push(m);
                marks.push(-m);
                m *= 4.0;
            }
            marks.retain(|&x| x > a && x < b);
            marks.sort_by(f64::total_cmp);
            pts.extend(marks);
            pts.push(b);
            pts.windows(2).map(|w| Map::Cubic { a: w[0], b: w[1] }).collect()
        }
        (true, true) => vec![Map::Cubic { a, b }],
        (true, false) => vec![Map::Cubic { a, b: a + 1.0 }, Map::Upper { a: a + 1.0 }],
        (false, true) => vec![Map::Lower { b: b - 1.0 }, Map::Cubic { a: b - 1.0, b }],
        (false, false) => vec![
            Map::Lower { b: -1.0 },
            Map::Cubic { a: -1.0, b: 0.0 },
            Map::Cubic { a: 0.0, b: 1.0 },
            Map::Upper { a: 1.0 },
        ],
    })
}

struct Segment {
    lo: f64,
    hi: f64,
    map: usize,
    val: Vec<f64>,
    err: Vec<f64>,
    floor: Vec<f64>,
}

/// One 21-point Kronrod rule with the QUADPACK error heuristic, per component.
fn gk21<F>(f: &mut F, map: Map, lo: f64, hi: f64, dim: usize, buf: &mut Vec<Vec<f64>>) -> Result<Segment, QuadError>
where
    F: FnMut(f64, &mut [f64]),
{
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    buf.resize_with(21, Vec::new);
    let mut eval = |t: f64, out: &mut Vec<f64>| -> Result<(), QuadError> {
        out.clear();
        out.resize(dim, 0.0);
        let (x, jac) = map.apply(t);
        if jac == 0.0 || !x.is_finite() {
            return Ok(());
        }
        f(x, out);
        for v in out.iter_mut() {
            *v *= jac;
            if !v.is_finite() {
                return Err(QuadError::NonFinite { x });
            }
        }
        Ok(())
    };
    // buf[0] centre, buf[2i+1], buf[2i+2] the ± pair at XGK[i].
    eval(c, &mut buf[0])?;
    for i in 0..10 {
        let dx = h * XGK[i];
        let (l, r) = buf.split_at_mut(2 * i + 2);
        eval(c - dx, &mut l[2 * i + 1])?;
        eval(c + dx, &mut r[0])?;
    }
    let mut val = vec![0.0; dim];
    let mut err = vec![0.0; dim];
    let mut floor = vec![0.0; dim];
    for d in 0..dim {
        let fc = buf[0][d];
        let mut rk = WGK[10] * fc;
        let mut rabs = rk.abs();
        let mut rg = 0.0;
        for i in 0..10 {
            let s = buf[2 * i + 1][d] + buf[2 * i + 2][d];
            rk += WGK[i] * s;
            rabs += WGK[i] * (buf[2 * i + 1][d].abs() + buf[2 * i + 2][d].abs());
            if i % 2 == 1 {
                rg += WG[i / 2] * s;
            }
        }
        let mean = 0.5 * rk;
        let mut rasc = WGK[10] * (fc - mean).abs();
        for i in 0..10 {
            rasc += WGK[i] * ((buf[2 * i + 1][d] - mean).abs() + (buf[2 * i + 2][d] - mean).abs());
        }
        let (rk, rabs, rasc) = (rk * h, rabs * h.abs(), rasc * h.abs());
        let mut e = ((rk - rg * h).abs()).max(0.0);
        if rasc != 0.0 && e != 0.0 {
            e = rasc * (200.0 * e / rasc).powf(1.5).min(1.0);
        }
        let fl = 50.0 * f64::EPSILON * rabs;
        val[d] = rk;
        err[d] = e.max(fl);
        floor[d] = fl;
    }
    Ok(Segment { lo, hi, map: 0, val, err, floor })
}

fn adaptive<F>(mut f: F, maps: &[Map], dim: usize, opts: &QuadOptions) -> Result<VecQuadResult, QuadError>
where
    F: FnMut(f64, &mut [f64]),
{
    let mut buf = Vec::new();
    let mut segs = Vec::new();
    let mut evaluations = 0;
    for (m, &map) in maps.iter().enumerate() {
        let mut s = gk21(&mut f, map, 0.0, 1.0, dim, &mut buf)?;
        s.map = m;
        segs.push(s);
        evaluations += 21;
    }
    let mut splits = 0;
    loop {
        let mut val = vec![0.0; dim];
        let mut err = vec![0.0; dim];
        let mut floor = vec![0.0; dim];
        for s in &segs {
            for d in 0..dim {
                val[d] += s.val[d];
                err[d] += s.err[d];
                floor[d] += s.floor[d];
            }
        }
        let tol: Vec<f64> = (0..dim).map(|d| opts.abs_tol.max(opts.rel_tol * val[d].abs())).collect();
        let done = (0..dim).all(|d| err[d] <= tol[d] || err[d] <= 2.0 * floor[d]);
        if done || segs.is_empty() {
            return Ok(VecQuadResult { values: val, errors: err, evaluations });
        }
        if splits >= opts.max_subdivisions {
            let worst = (0..dim)
                .max_by(|&p, &q| (err[p] / tol[p].max(1e-300)).total_cmp(&(err[q] / tol[q].max(1e-300))))
                .unwrap_or(0);
            return Err(QuadError::Budget { value: val[worst], error: err[worst], limit: opts.max_subdivisions });
        }
        // Bisect the segment carrying the largest tolerance-weighted error.
        let weight = |s: &Segment| {
            (0..dim)
                .map(|d| (s.err[d] - s.floor[d]).max(0.0) / tol[d].max(1e-300))
                .fold(0.0, f64::max)
        };
        let (idx, _) = segs
            .iter()
            .enumerate()
            .filter(|(_, s)| s.hi - s.lo > 4.0 * f64::EPSILON * s.hi.abs().max(s.lo.abs()).max(1e-300))
            .map(|(i, s)| (i, weight(s)))
            .max_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap_or((usize::MAX, 0.0));
        if idx == usize::MAX {
            return Ok(VecQuadResult { values: val, errors: err, evaluations });
        }
        let s = segs.swap_remove(idx);
        let mid = 0.5 * (s.lo + s.hi);
        let mut l = gk21(&mut f, maps[s.map], s.lo, mid, dim, &mut buf)?;
        let mut r = gk21(&mut f, maps[s.map], mid, s.hi, dim, &mut buf)?;
        l.map = s.map;
        r.map = s.map;
        segs.push(l);
        segs.push(r);
        evaluations += 42;
        splits += 1;
    }
}

/// ∫_a^b f(x) dx; either limit may be infinite.
pub fn integrate<F>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadResult, QuadError>
where
    F: Fn(f64) -> f64,
{
    let maps = pieces(a, b)?;
    let r = adaptive(|x, out: &mut [f64]| out[0] = f(x), &maps, 1, opts)?;
    Ok(QuadResult { value: r.values[0], error: r.errors[0], evaluations: r.evaluations })
}

/// Vector-valued ∫_a^b f(x) dx where `f` fills a slice of length `dim`.
/// Convergence requires every component to meet its own tolerance.
pub fn integrate_vec<F>(f: F, dim: usize, a: f64, b: f64, opts: &QuadOptions) -> Result<VecQuadResult, QuadError>
where
    F: FnMut(f64, &mut [f64]),
{
    let maps = pieces(a, b)?;
    adaptive(f, &maps, dim, opts)
}

/// Vector-valued integral over a union of disjoint intervals.
pub fn integrate_union_vec<F>(
    f: F,
    dim: usize,
    domain: &[(f64, f64)],
    opts: &QuadOptions,
) -> Result<VecQuadResult, QuadError>
where
    F: FnMut(f64, &mut [f64]),
{
    let mut maps = Vec::new();
    for &(a, b) in domain {
        maps.extend(pieces(a, b)?);
    }
    adaptive(f, &maps, dim, opts)
}

/// ∫ over a union of disjoint intervals.
pub fn integrate_union_1d<F>(f: F, domain: &[(f64, f64)], opts: &QuadOptions) -> Result<QuadResult, QuadError>
where
    F: Fn(f64) -> f64,
{
    let r = integrate_union_vec(|x, out: &mut [f64]| out[0] = f(x), 1, domain, opts)?;
    Ok(QuadResult { value: r.values[0], error: r.errors[0], evaluations: r.evaluations })
}

/// Restricts a union of intervals to the part above `x`, split at `cut`
/// points so that no piece straddles a known kink of the integrand.
fn clip_above(domain: &[(f64, f64)], x: f64, cuts: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &(a, b) in domain {
        let lo = a.max(x);
        if lo >= b {
            continue;
        }
        let mut pts: Vec<f64> = cuts.iter().copied().filter(|&c| c > lo && c < b).collect();
        pts.sort_by(f64::total_cmp);
        let mut start = lo;
        for p in pts {
            out.push((start, p));
            start = p;
        }
        out.push((start, b));
    }
    out
}

fn split_at(domain: &[(f64, f64)], cuts: &[f64]) -> Vec<(f64, f64)> {
    clip_above(domain, f64::NEG_INFINITY, cuts)
}

/// The antisymmetrised double integral
/// ½ ∫_D ∫_D w(λ) w(μ) f(λ,μ) [g_j(λ) g_k(μ) − g_k(λ) g_j(μ)] dλ dμ
/// for every requested pair (j, k), over one domain D (a union of intervals).
///
/// With f antisymmetric the integrand is symmetric under λ ↔ μ, so only the
/// triangle μ > λ is integrated. Each component is multiplied by
/// `scale[j]·scale[k]` so that a single absolute tolerance is meaningful.
pub struct AntisymBatch<'a> {
    pub domain: &'a [(f64, f64)],
    pub weight: &'a (dyn Fn(f64) -> f64 + Sync),
    pub kernel: &'a (dyn Fn(f64, f64) -> f64 + Sync),
    pub funcs: &'a (dyn Fn(f64, &mut [f64]) + Sync),
    pub nfuncs: usize,
    pub pairs: &'a [(usize, usize)],
    pub scale: &'a [f64],
}

impl AntisymBatch<'_> {
    pub fn integrate(&self, opts: &QuadOptions) -> Result<VecQuadResult, QuadError> {
        let dim = self.pairs.len();
        let inner_opts = QuadOptions {
            rel_tol: opts.rel_tol * 0.05,
            abs_tol: opts.abs_tol * 0.05,
            max_subdivisions: opts.max_subdivisions,
        };
        let mut fail: Option<QuadError> = None;
        let mut evals = 0usize;
        let mut gl = vec![0.0; self.nfuncs];
        let mut gm = vec![0.0; self.nfuncs];
        let outer = |lam: f64, out: &mut [f64]| {
            if fail.is_some() {
                return;
            }
            let wl = (self.weight)(lam);
            if wl == 0.0 {
                return;
            }
            (self.funcs)(lam, &mut gl);
            // Kinks of f sit on μ = λ and μ = −λ.
            let inner_dom = clip_above(self.domain, lam, &[-lam]);
            let inner = |mu: f64, o: &mut [f64]| {
                let wm = (self.weight)(mu);
                if wm == 0.0 {
                    return;
                }
                (self.funcs)(mu, &mut gm);
                let f = (self.kernel)(lam, mu);
                let pref = wl * wm * f;
                for (slot, &(j, k)) in o.iter_mut().zip(self.pairs) {
                    let br = gl[j] * gm[k] - gl[k] * gm[j];
                    *slot = pref * br * self.scale[j] * self.scale[k];
                }
            };
            match integrate_union_vec(inner, dim, &inner_dom, &inner_opts) {
                Ok(r) => {
                    evals += r.evaluations;
                    out.copy_from_slice(&r.values);
                }
                Err(e) => fail = Some(e),
            }
        };
        let res = integrate_union_vec(outer, dim, &split_at(self.domain, &[0.0]), opts);
        if let Some(e) = fail {
            return Err(e);
        }
        let mut r = res?;
        r.evaluations += evals;
        Ok(r)
    }
}

/// Single-pair form of [`AntisymBatch`] over possibly different λ and μ
/// domains; the full product domain is integrated.
#[allow(clippy::too_many_arguments)]
pub fn integrate_2d_antisym<G1, G2, W, K>(
    g_j: G1,
    g_k: G2,
    w: W,
    f: K,
    domain_lambda: &[(f64, f64)],
    domain_mu: &[(f64, f64)],
    opts: &QuadOptions,
) -> Result<QuadResult, QuadError>
where
    G1: Fn(f64) -> f64,
    G2: Fn(f64) -> f64,
    W: Fn(f64) -> f64,
    K: Fn(f64, f64) -> f64,
{
    let inner_opts = QuadOptions { rel_tol: opts.rel_tol * 0.05, abs_tol: opts.abs_tol * 0.05, ..*opts };
    let mut fail = None;
    let mut evals = 0;
    let outer = |lam: f64| {
        if fail.is_some() {
            return 0.0;
        }
        let wl = w(lam);
        let (gjl, gkl) = (g_j(lam), g_k(lam));
        let inner = |mu: f64| 0.5 * wl * w(mu) * f(lam, mu) * (gjl * g_k(mu) - gkl * g_j(mu));
        match integrate_union_1d(inner, &split_at(domain_mu, &[lam, -lam]), &inner_opts) {
            Ok(r) => {
                evals += r.evaluations;
                r.value
            }
            Err(e) => {
                fail = Some(e);
                0.0
            }
        }
    };
    // integrate_union_1d takes Fn; route the stateful closure through a cell.
    let cell = std::cell::RefCell::new(outer);
    let res = integrate_union_1d(|x| (cell.borrow_mut())(x), &split_at(domain_lambda, &[0.0]), opts);
    drop(cell);
    if let Some(e) = fail {
        return Err(e);
    }
    let mut r = res?;
    r.evaluations += evals;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use approx::assert_relative_eq;

    fn opts() -> QuadOptions {
        QuadOptions::with_tol(1e-12, 0.0)
    }

    #[test]
    fn gaussian_over_real_line() {
        let r = integrate(|x| (-x * x).exp(), f64::NEG_INFINITY, f64::INFINITY, &opts()).unwrap();
        assert_relative_eq!(r.value, PI.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| x * x, 0.0, 1.0, &opts()).unwrap();
        assert_relative_eq!(r.value, 1.0 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn endpoint_singularity() {
        let r = integrate(|x| x.powf(-0.5), 0.0, 1.0, &opts()).unwrap();
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-11);
        let r = integrate(|x| x.powf(-0.9) * (-x).exp(), 0.0, f64::INFINITY, &QuadOptions::with_tol(1e-10, 0.0)).unwrap();
        assert_relative_eq!(r.value, crate::specfun::gamma(0.1), max_relative = 1e-9);
    }

    #[test]
    fn algebraic_tail() {
        let r = integrate(|x| 1.0 / (1.0 + x * x), f64::NEG_INFINITY, f64::INFINITY, &opts()).unwrap();
        assert_relative_eq!(r.value, PI, max_relative = 1e-11);
    }

    #[test]
    fn union_and_empty() {
        let r = integrate_union_1d(|x| x, &[(0.0, 1.0), (2.0, 3.0)], &opts()).unwrap();
        assert_relative_eq!(r.value, 0.5 + 2.5, max_relative = 1e-14);
        assert_eq!(integrate(|x| x, 1.0, 1.0, &opts()).unwrap().value, 0.0);
        assert!(integrate(|x| x, 2.0, 1.0, &opts()).is_err());
    }

    #[test]
    fn non_finite_reported() {
        assert!(matches!(
            integrate(|x| if x > 0.5 { f64::NAN } else { 1.0 }, 0.0, 1.0, &opts()),
            Err(QuadError::NonFinite { .. })
        ));
    }

    #[test]
    fn vector_components_independent() {
        let r = integrate_vec(
            |x, o: &mut [f64]| {
                o[0] = x.exp();
                o[1] = 1e-8 * x.cos();
            },
            2,
            0.0,
            2.0,
            &opts(),
        )
        .unwrap();
        assert_relative_eq!(r.values[0], 2f64.exp() - 1.0, max_relative = 1e-13);
        assert_relative_eq!(r.values[1], 1e-8 * 2f64.sin(), max_relative = 1e-12);
    }

    #[test]
    fn antisym_matches_closed_form() {
        // Gaussians against the Schur kernel: the full-line value is
        // π σ_j σ_k (σ_k² − σ_j²)/(σ_k² + σ_j²).
        let (sj, sk): (f64, f64) = (0.75, 1.3);
        let exact = PI * sj * sk * (sk * sk - sj * sj) / (sk * sk + sj * sj);
        let f = |l: f64, m: f64| (m - l) / (m + l);
        let dom = [(f64::NEG_INFINITY, f64::INFINITY)];
        let r = integrate_2d_antisym(
            |x| (-(x / sj).powi(2)).exp(),
            |x| (-(x / sk).powi(2)).exp(),
            |_| 1.0,
            f,
            &dom,
            &dom,
            &QuadOptions::with_tol(1e-10, 1e-13),
        )
        .unwrap();
        assert_relative_eq!(r.value, exact, max_relative = 1e-8);

        let sig = [sj, sk];
        let funcs = |x: f64, o: &mut [f64]| {
            for (v, s) in o.iter_mut().zip(sig) {
                *v = (-(x / s).powi(2)).exp();
            }
        };
        let batch = AntisymBatch {
            domain: &dom,
            weight: &|_| 1.0,
            kernel: &f,
            funcs: &funcs,
            nfuncs: 2,
            pairs: &[(0, 1), (1, 0), (0, 0)],
            scale: &[1.0, 1.0],
        };
        let v = batch.integrate(&QuadOptions::with_tol(1e-11, 1e-14)).unwrap();
        assert_relative_eq!(v.values[0], exact, max_relative = 1e-9);
        assert_eq!(v.values[1], -v.values[0]);
        assert_eq!(v.values[2], 0.0);
    }

    #[test]
    fn antisym_swap_negates() {
        let dom = [(0.0, 0.7), (2.0, f64::INFINITY)];
        let f = |l: f64, m: f64| (m - l) / (m + l);
        let ga = |x: f64| (-x).exp();
        let gb = |x: f64| (-2.0 * x).exp();
        let o = QuadOptions::with_tol(1e-10, 1e-14);
        let p = integrate_2d_antisym(ga, gb, |x: f64| x.sqrt(), f, &dom, &dom, &o).unwrap();
        let q = integrate_2d_antisym(gb, ga, |x: f64| x.sqrt(), f, &dom, &dom, &o).unwrap();
        assert_relative_eq!(p.value, -q.value, max_relative = 1e-9);
        let z = integrate_2d_antisym(ga, ga, |x: f64| x.sqrt(), f, &dom, &dom, &o).unwrap();
        assert_eq!(z.value, 0.0);
    }
}
