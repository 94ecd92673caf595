use crate::scalar::Scalar;

/// Euclidean projection onto `{u : ‖u‖₁ ≤ radius}`.
///
/// Outside the ball the result is the soft-threshold `sgn(v)(|v| − ρ)₊` with
/// the smallest `ρ` meeting the budget, found by sorting magnitudes.
pub fn l1_project<S: Scalar>(v: &[S], radius: S) -> Vec<S> {
    assert!(radius > S::zero(), "l1 radius must be positive");
    let norm: S = v.iter().map(|x| x.abs()).sum();
    if norm <= radius {
        return v.to_vec();
    }
    let mut mags: Vec<S> = v.iter().map(|x| x.abs()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).expect("finite input"));
    let mut cum = S::zero();
    let mut rho = S::zero();
    for (j, &m) in mags.iter().enumerate() {
        cum = cum + m;
        let cand = (cum - radius) / S::from_usize_lossy(j + 1);
        if m > cand {
            rho = cand;
        } else {
            break;
        }
    }
    v.iter().map(|&x| x.signum() * (x.abs() - rho).max(S::zero())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_examples() {
        assert_eq!(l1_project(&[3.0, -1.0, 0.0], 2.0), vec![2.0, 0.0, 0.0]);
        assert_eq!(l1_project(&[0.5, -0.5], 2.0), vec![0.5, -0.5]);
        assert_eq!(l1_project(&[5.0], 2.0), vec![2.0]);
        assert_eq!(l1_project(&[-5.0f32], 2.0), vec![-2.0f32]);
    }

    #[test]
    fn saturates_the_ball() {
        let out = l1_project(&[30.0f64, -12.0, 4.0, 0.1], 10.0);
        let norm: f64 = out.iter().map(|x| x.abs()).sum();
        assert!((norm - 10.0).abs() < 1e-12);
    }
}
