//! One-dimensional maximization: uniform grid scan followed by golden-section
//! refinement around the best grid point.

use crate::par::{self, Execution};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a maximum of `f` on `[lo, hi]`, stopping when the
/// bracket is narrower than `tol`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    // Bracket shrinks by 0.618 per step; the cap only guards against tol = 0.
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Evaluates `f` at `points` equally spaced nodes on `[lo, hi]`, then refines
/// between the neighbours of the best node. Returns the better of the grid
/// optimum and the refined point; ties resolve to the lowest grid index.
pub fn grid_then_golden<F>(f: F, lo: f64, hi: f64, points: usize, tol: f64, exec: Execution) -> (f64, f64)
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    let points = points.max(2);
    let step = (hi - lo) / (points - 1) as f64;
    let node = |i: usize| if i == points - 1 { hi } else { lo + step * i as f64 };
    let values = par::map_indexed(exec, points, |i| f(node(i)));
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    let a = node(best.saturating_sub(1));
    let b = node((best + 1).min(points - 1));
    let (x, fx) = golden_max(&f, a, b, tol);
    if fx > values[best] {
        (x, fx)
    } else {
        (node(best), values[best])
    }
}
