//! Adaptive Simpson quadrature for the one-dimensional radial integrals
//! behind kernel masses and Mayer integrals.

const MAX_DEPTH: u32 = 48;

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    refine(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Surface measure of the unit sphere in `dim` dimensions (2, 2π, 4π).
pub fn unit_sphere_measure(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI,
        _ => panic!("unsupported dimension {dim}"),
    }
}

/// `∫_{|x| ≤ upper} g(|x|) dx` in `dim` dimensions, via the radial reduction.
pub fn radial_integral<F: Fn(f64) -> f64>(g: F, dim: usize, upper: f64, tol: f64) -> f64 {
    let surface = unit_sphere_measure(dim);
    let power = (dim - 1) as i32;
    let integrand = |r: f64| g(r) * r.powi(power);
    surface * adaptive_simpson(&integrand, 0.0, upper, tol / surface)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = adaptive_simpson(&|x: f64| x * x * x - 2.0 * x, 0.0, 2.0, 1e-12);
        assert!((v - 0.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_tail() {
        let v = adaptive_simpson(&|x: f64| (-x * x).exp(), 0.0, 8.0, 1e-13);
        let expected = 0.5 * std::f64::consts::PI.sqrt();
        assert!((v - expected).abs() < 1e-11, "{v}");
    }

    #[test]
    fn ball_volumes() {
        for (dim, vol) in [(1, 2.0), (2, std::f64::consts::PI), (3, 4.0 / 3.0 * std::f64::consts::PI)] {
            let v = radial_integral(|_| 1.0, dim, 1.0, 1e-12);
            assert!((v - vol).abs() < 1e-10);
        }
    }
}
