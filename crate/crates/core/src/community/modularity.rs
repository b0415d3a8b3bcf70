use crate::error::{Error, Result};
use crate::graph::ConceptNetwork;

/// `Q = (1/2m) Σ_ij (w_ij - s_i s_j / 2m) δ(c_i, c_j)` over ordered pairs,
/// with `m` the total link weight. Evaluated per community as
/// `Σ_c [in_c / 2m - (tot_c / 2m)²]`.
pub fn eval_modularity(net: &ConceptNetwork, membership: &[usize]) -> Result<f64> {
    let n = net.node_count();
    if membership.len() != n {
        return Err(Error::InvalidArgument(format!(
            "partition covers {} of {} nodes",
            membership.len(),
            n
        )));
    }
    let two_m = 2.0 * net.total_weight();
    if two_m == 0.0 {
        return Err(Error::ZeroWeight);
    }
    let k = membership.iter().copied().max().map_or(0, |c| c + 1);
    let mut inside = vec![0.0; k];
    let mut total = vec![0.0; k];
    for i in 0..n {
        let c = membership[i];
        for (j, w) in net.neighbors(i) {
            total[c] += w;
            if membership[j] == c {
                inside[c] += w;
            }
        }
    }
    Ok(inside
        .iter()
        .zip(&total)
        .map(|(&a, &t)| a / two_m - (t / two_m) * (t / two_m))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangles() -> ConceptNetwork {
        let mut g = ConceptNetwork::anonymous(6);
        for (i, j) in [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)] {
            g.set_weight(i, j, 1.0);
        }
        g
    }

    #[test]
    fn one_community_is_zero() {
        let q = eval_modularity(&two_triangles(), &[0; 6]).unwrap();
        assert!(q.abs() < 1e-15);
    }

    #[test]
    fn natural_split_is_half() {
        // 2 * (6/12 - (6/12)^2)
        let q = eval_modularity(&two_triangles(), &[0, 0, 0, 1, 1, 1]).unwrap();
        assert_eq!(q, 0.5);
    }

    #[test]
    fn singletons_are_negative() {
        let g = two_triangles();
        let q = eval_modularity(&g, &[0, 1, 2, 3, 4, 5]).unwrap();
        let two_m = 2.0 * g.total_weight();
        let expected: f64 = -g.strengths().iter().map(|s| (s / two_m).powi(2)).sum::<f64>();
        assert!((q - expected).abs() < 1e-15);
        assert!(q < 0.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            eval_modularity(&ConceptNetwork::anonymous(2), &[0, 0]),
            Err(Error::ZeroWeight)
        ));
        assert!(eval_modularity(&two_triangles(), &[0, 0]).is_err());
    }
}
