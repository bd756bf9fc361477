use crate::chain::matrix::TransitionMatrix;
use crate::error::{Error, Result};

/// `D(g, g) = 1/2 sum_{k,l} pi_k W_kl (g_k - g_l)^2`.
pub fn dirichlet_form(w: &TransitionMatrix, g: &[f64]) -> f64 {
    assert_eq!(g.len(), w.size(), "test function length");
    let pi = w.pi();
    let mut total = 0.0;
    for k in 0..w.size() {
        for l in 0..w.size() {
            let d = g[k] - g[l];
            total += pi[k] * w.get(k, l) * d * d;
        }
    }
    0.5 * total
}

/// Shifts `g` so that `sum pi g = 0`; returns the shift applied.
pub fn center(pi: &[f64], g: &mut [f64]) -> f64 {
    let m: f64 = pi.iter().zip(g.iter()).map(|(p, x)| p * x).sum();
    if m.abs() > 1e-10 {
        g.iter_mut().for_each(|x| *x -= m);
        m
    } else {
        0.0
    }
}

/// `sum pi g^2 / D(g, g)` after centring `g`; never exceeds the relaxation time.
pub fn rayleigh_lower_bound(w: &TransitionMatrix, g: &[f64]) -> Result<f64> {
    let mut g = g.to_vec();
    center(w.pi(), &mut g);
    let var: f64 = w.pi().iter().zip(&g).map(|(p, x)| p * x * x).sum();
    if var == 0.0 {
        return Err(Error::InvalidInput("constant test function".into()));
    }
    let d = dirichlet_form(w, &g);
    if d <= var * 1e-15 {
        return Err(Error::DisconnectedDirection);
    }
    Ok(var / d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;

    fn two_state(p: f64) -> TransitionMatrix {
        TransitionMatrix::from_rows(&[&[1.0 - p, p], &[p, 1.0 - p]]).unwrap()
    }

    #[test]
    fn constants_have_no_energy() {
        assert_eq!(dirichlet_form(&two_state(0.3), &[2.0, 2.0]), 0.0);
    }

    #[test]
    fn two_state_hand_expansion() {
        let p = 0.3;
        let w = two_state(p);
        assert_abs_diff_eq!(dirichlet_form(&w, &[1.0, -1.0]), 2.0 * p, epsilon = 1e-15);
        assert_abs_diff_eq!(
            dirichlet_form(&w, &[1.0, -1.0]),
            dirichlet_form(&w, &[6.0, 4.0]),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(rayleigh_lower_bound(&w, &[1.0, -1.0]).unwrap(), 1.0 / (2.0 * p), epsilon = 1e-12);
    }

    #[test]
    fn disconnected_direction() {
        let w = TransitionMatrix::uniform(DMatrix::identity(2, 2)).unwrap();
        assert!(matches!(rayleigh_lower_bound(&w, &[1.0, -1.0]), Err(Error::DisconnectedDirection)));
        assert!(matches!(rayleigh_lower_bound(&w, &[1.0, 1.0]), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn recentres_before_evaluating() {
        let w = two_state(0.25);
        assert_abs_diff_eq!(rayleigh_lower_bound(&w, &[3.0, 1.0]).unwrap(), 2.0, epsilon = 1e-12);
    }
}
