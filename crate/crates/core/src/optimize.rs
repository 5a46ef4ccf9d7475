//! Bounded scalar minimization.

/// Stop once the bracket is narrower than this.
pub const GOLDEN_TOL: f64 = 1e-7;

/// Golden-section search for a minimum of `f` on `[a, b]`, returning
/// `(x_min, f(x_min))`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;

    if b < a {
        std::mem::swap(&mut a, &mut b);
    }
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_vertex() {
        let (x, fx) = golden_section(|x| (x - 0.3) * (x - 0.3), -1.0, 1.0, 1e-9);
        assert!((x - 0.3).abs() < 1e-8);
        assert!(fx < 1e-16);
    }

    #[test]
    fn monotone_function_goes_to_edge() {
        let (x, _) = golden_section(|x| x, 2.0, 5.0, 1e-8);
        assert!((x - 2.0).abs() < 1e-7);
    }

    #[test]
    fn reversed_bracket() {
        let (x, _) = golden_section(|x| (x + 2.0).powi(2), 0.0, -4.0, 1e-9);
        assert!((x + 2.0).abs() < 1e-8);
    }
}
