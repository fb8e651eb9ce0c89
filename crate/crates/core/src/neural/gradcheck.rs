use rand::seq::index::sample;
use rand::SeedableRng;

use crate::scalar::Scalar;

use super::{Gradients, Params, Rng};

/// Finite-difference formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stencil {
    /// `(f(x+e) - f(x-e)) / 2e`.
    Central2,
    /// Fourth-order central difference over `x±e` and `x±2e`; its smaller
    /// truncation error allows a larger `eps` and less rounding noise.
    Central4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheckOptions {
    pub eps: f64,
    pub stencil: Stencil,
    /// When set, each coordinate is also estimated with `eps / 8`; if the two
    /// estimates differ by more than this relative amount the function is not
    /// smooth enough around the point (a ReLU kink inside the stencil, or
    /// rounding noise) and the coordinate is counted in
    /// [`GradCheckReport::nonsmooth`] instead of being scored.
    pub smooth_tol: Option<f64>,
    /// Check every coordinate when the model has at most this many; otherwise
    /// sample this many at random.
    pub max_coords: usize,
    pub seed: u64,
}

impl Default for GradCheckOptions {
    fn default() -> Self {
        GradCheckOptions {
            eps: 1e-5,
            stencil: Stencil::Central2,
            smooth_tol: None,
            max_coords: 400,
            seed: 0,
        }
    }
}

impl GradCheckOptions {
    /// Fourth-order stencil with `eps = 1e-3`, for deep models whose smallest
    /// gradients sit near the rounding noise of the two-point formula.
    pub fn fourth_order() -> Self {
        GradCheckOptions {
            eps: 1e-3,
            stencil: Stencil::Central4,
            smooth_tol: Some(1e-5),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub max_rel_error: f64,
    pub checked: usize,
    /// Coordinates skipped by the smoothness guard.
    pub nonsmooth: usize,
    /// Parameter name and flat index of the worst coordinate.
    pub worst: Option<(String, usize)>,
}

pub fn relative_error(a: f64, n: f64) -> f64 {
    (a - n).abs() / a.abs().max(n.abs()).max(1e-8)
}

/// Compares `analytic` against central differences of `loss`.
///
/// `access` exposes the parameters of `model` so they can be perturbed in
/// place; `loss` must be deterministic (reseed any dropout generator inside).
pub fn grad_check<S, T, A, F>(
    model: &mut T,
    access: A,
    mut loss: F,
    analytic: &Gradients<S>,
    opts: GradCheckOptions,
) -> GradCheckReport
where
    S: Scalar,
    T: ?Sized,
    A: Fn(&mut T) -> &mut Params<S>,
    F: FnMut(&T) -> S,
{
    let sizes: Vec<usize> = access(model).iter().map(|(_, t)| t.len()).collect();
    let total: usize = sizes.iter().sum();
    let coords: Vec<usize> = if total <= opts.max_coords {
        (0..total).collect()
    } else {
        let mut rng = Rng::seed_from_u64(opts.seed);
        let mut v = sample(&mut rng, total, opts.max_coords).into_vec();
        v.sort_unstable();
        v
    };
    let locate = |mut flat: usize| -> (usize, usize) {
        for (i, &n) in sizes.iter().enumerate() {
            if flat < n {
                return (i, flat);
            }
            flat -= n;
        }
        unreachable!("coordinate out of range")
    };
    let mut report = GradCheckReport {
        max_rel_error: 0.0,
        checked: 0,
        nonsmooth: 0,
        worst: None,
    };
    for flat in coords {
        let (ti, j) = locate(flat);
        let orig = access(model).tensors_mut().nth(ti).expect("tensor").data()[j];
        let mut at = |d: f64| -> f64 {
            access(model).tensors_mut().nth(ti).expect("tensor").data_mut()[j] = orig + S::of(d);
            loss(model).as_f64()
        };
        let mut estimate = |e: f64| match opts.stencil {
            Stencil::Central2 => (at(e) - at(-e)) / (2.0 * e),
            Stencil::Central4 => (8.0 * (at(e) - at(-e)) - (at(2.0 * e) - at(-2.0 * e))) / (12.0 * e),
        };
        let num = estimate(opts.eps);
        let smooth = opts
            .smooth_tol
            .map_or(true, |tol| relative_error(num, estimate(opts.eps / 8.0)) <= tol);
        access(model).tensors_mut().nth(ti).expect("tensor").data_mut()[j] = orig;
        if !smooth {
            report.nonsmooth += 1;
            continue;
        }
        let a = analytic.tensors()[ti].data()[j].as_f64();
        let err = relative_error(a, num);
        report.checked += 1;
        if err > report.max_rel_error || report.worst.is_none() {
            report.max_rel_error = report.max_rel_error.max(err);
            let name = access(model).iter().nth(ti).expect("tensor").0.to_owned();
            report.worst = Some((name, j));
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neural::Tensor;

    fn linear_loss(p: &Params<f64>) -> f64 {
        // L = sum_i w_i x_i + b, x fixed
        let w = p.get(p.id("w").unwrap()).data();
        let b = p.get(p.id("b").unwrap()).data()[0];
        w.iter().zip([0.5, -1.5, 2.0]).map(|(a, x)| a * x).sum::<f64>() + b
    }

    fn linear() -> (Params<f64>, Gradients<f64>) {
        let mut p = Params::new();
        let w = p.add("w", Tensor::from_vec(&[3], vec![0.1, 0.2, -0.3]).unwrap());
        let b = p.add("b", Tensor::from_vec(&[1], vec![0.7]).unwrap());
        let mut g = p.zeros_like();
        g.get_mut(w).data_mut().copy_from_slice(&[0.5, -1.5, 2.0]);
        g.get_mut(b).data_mut()[0] = 1.0;
        (p, g)
    }

    #[test]
    fn linear_model_is_exact() {
        let (mut p, g) = linear();
        let r = grad_check(&mut p, |p| p, linear_loss, &g, GradCheckOptions::default());
        assert_eq!(r.checked, 4);
        assert!(r.max_rel_error < 1e-8, "{r:?}");
    }

    #[test]
    fn corrupted_gradient_is_detected() {
        let (mut p, mut g) = linear();
        g.scale(2.0);
        let r = grad_check(&mut p, |p| p, linear_loss, &g, GradCheckOptions::default());
        assert!((r.max_rel_error - 0.5).abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn fourth_order_stencil_is_exact_on_quartics() {
        // L = w^4, dL/dw = 4 w^3
        let mut p = Params::<f64>::new();
        let w = p.add("w", Tensor::from_vec(&[1], vec![0.9]).unwrap());
        let mut g = p.zeros_like();
        g.get_mut(w).data_mut()[0] = 4.0 * 0.9f64.powi(3);
        let quartic = |p: &Params<f64>| p.get(p.id("w").unwrap()).data()[0].powi(4);
        let opts = GradCheckOptions {
            eps: 0.1,
            ..GradCheckOptions::fourth_order()
        };
        assert!(grad_check(&mut p, |p| p, quartic, &g, opts).max_rel_error < 1e-12);
        let two = GradCheckOptions {
            eps: 0.1,
            ..GradCheckOptions::default()
        };
        assert!(grad_check(&mut p, |p| p, quartic, &g, two).max_rel_error > 1e-3);
    }

    #[test]
    fn kinks_inside_the_stencil_are_skipped() {
        let mut p = Params::<f64>::new();
        let w = p.add("w", Tensor::from_vec(&[2], vec![5e-4, 0.7]).unwrap());
        let mut g = p.zeros_like();
        g.get_mut(w).data_mut().copy_from_slice(&[1.0, 1.0]);
        let abs_sum = |p: &Params<f64>| p.get(p.id("w").unwrap()).data().iter().map(|v| v.abs()).sum::<f64>();
        let r = grad_check(&mut p, |p| p, abs_sum, &g, GradCheckOptions::fourth_order());
        assert_eq!((r.checked, r.nonsmooth), (1, 1));
        assert!(r.max_rel_error < 1e-9);
    }

    #[test]
    fn subsamples_large_models() {
        let mut p = Params::<f64>::new();
        p.add("w", Tensor::zeros(&[1000]));
        let g = p.zeros_like();
        let opts = GradCheckOptions {
            max_coords: 200,
            ..GradCheckOptions::default()
        };
        let r = grad_check(&mut p, |p| p, |p| p.get(p.id("w").unwrap()).data().iter().sum::<f64>() * 0.0, &g, opts);
        assert_eq!(r.checked, 200);
    }
}
