use crate::error::{NfftError, Result};

/// Sizes shared by every stage of a transform.
///
/// Arrays shaped `N` or `Ñ` are stored dimension-1-fastest. Logical index
/// `n_d ∈ [-N_d/2, N_d/2)` lives at offset `n_d + N_d/2` in an `N`-shaped array.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformGeometry {
    n: Vec<usize>,
    ntilde: Vec<usize>,
    sigma: f64,
    m: usize,
    num_nodes: usize,
}

impl TransformGeometry {
    pub fn new(n: &[usize], m: usize, sigma: f64, num_nodes: usize) -> Result<Self> {
        if n.is_empty() {
            return Err(NfftError::BadGeometry(
                "at least one dimension is required".into(),
            ));
        }
        if !sigma.is_finite() || sigma <= 1.0 {
            return Err(NfftError::BadGeometry(format!(
                "oversampling factor {sigma} must exceed 1"
            )));
        }
        if m == 0 {
            return Err(NfftError::BadGeometry(
                "window half-width m must be at least 1".into(),
            ));
        }
        for (d, &nd) in n.iter().enumerate() {
            if nd < 2 || nd % 2 != 0 {
                return Err(NfftError::BadGeometry(format!(
                    "N[{d}] = {nd} must be even and at least 2"
                )));
            }
        }
        let ntilde: Vec<usize> = n
            .iter()
            .map(|&nd| 2 * (sigma * nd as f64 / 2.0).ceil() as usize)
            .collect();
        let min_nt = *ntilde.iter().min().unwrap();
        if 2 * m >= min_nt {
            return Err(NfftError::BadGeometry(format!(
                "window support 2m = {} does not fit the oversampled grid (min Ñ = {min_nt})",
                2 * m
            )));
        }
        Ok(TransformGeometry {
            n: n.to_vec(),
            ntilde,
            sigma,
            m,
            num_nodes,
        })
    }

    pub fn dims(&self) -> usize {
        self.n.len()
    }

    pub fn n(&self) -> &[usize] {
        &self.n
    }

    pub fn ntilde(&self) -> &[usize] {
        &self.ntilde
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    /// `|I_N|`
    pub fn grid_len(&self) -> usize {
        self.n.iter().product()
    }

    /// `|I_Ñ|`
    pub fn oversampled_len(&self) -> usize {
        self.ntilde.iter().product()
    }
}

/// Folds a coordinate onto the torus `[-1/2, 1/2)`.
#[inline]
pub fn fold(k: f64) -> f64 {
    let mut r = k - (k + 0.5).floor();
    if r >= 0.5 {
        r -= 1.0;
    }
    if r < -0.5 {
        r += 1.0;
    }
    r
}

/// Sampling nodes on the D-torus, stored coordinate-fastest (`D × J`).
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet {
    dims: usize,
    coords: Vec<f64>,
}

impl NodeSet {
    /// Validates and folds `coords` (length `dims * J`) into `[-1/2, 1/2)^D`.
    pub fn new(dims: usize, coords: &[f64]) -> Result<Self> {
        if dims == 0 || !coords.len().is_multiple_of(dims) {
            return Err(NfftError::ShapeMismatch {
                expected: dims.max(1) * (coords.len() / dims.max(1)),
                found: coords.len(),
            });
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(NfftError::NonFiniteNode { index: pos / dims });
        }
        Ok(NodeSet {
            dims,
            coords: coords.iter().map(|&k| fold(k)).collect(),
        })
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dims
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn node(&self, j: usize) -> &[f64] {
        &self.coords[j * self.dims..(j + 1) * self.dims]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oversampled_size_rounds_up_to_even() {
        let g = TransformGeometry::new(&[32, 32], 4, 2.0, 1024).unwrap();
        assert_eq!(g.ntilde(), &[64, 64]);
        let g = TransformGeometry::new(&[10], 2, 1.25, 1).unwrap();
        assert_eq!(g.ntilde(), &[14]);
        let g = TransformGeometry::new(&[16], 8, 2.0, 1).unwrap();
        assert_eq!(g.ntilde(), &[32]);
        let g = TransformGeometry::new(&[8], 4, 2.0, 1).unwrap();
        assert_eq!(g.ntilde(), &[16]);
        for &nd in g.n() {
            assert!(g.ntilde()[0] >= nd + 2);
        }
    }

    #[test]
    fn geometry_violations() {
        // 2m = Ñ = 16
        assert!(matches!(
            TransformGeometry::new(&[8], 8, 2.0, 1),
            Err(NfftError::BadGeometry(_))
        ));
        assert!(matches!(
            TransformGeometry::new(&[9], 2, 2.0, 1),
            Err(NfftError::BadGeometry(_))
        ));
        assert!(matches!(
            TransformGeometry::new(&[16], 2, 1.0, 1),
            Err(NfftError::BadGeometry(_))
        ));
        assert!(matches!(
            TransformGeometry::new(&[16], 0, 2.0, 1),
            Err(NfftError::BadGeometry(_))
        ));
        assert!(matches!(
            TransformGeometry::new(&[], 2, 2.0, 1),
            Err(NfftError::BadGeometry(_))
        ));
    }

    #[test]
    fn fold_maps_to_half_open_torus() {
        for &(k, want) in &[
            (0.5, -0.5),
            (-0.5, -0.5),
            (0.75, -0.25),
            (1.3, 0.3),
            (-1.0, 0.0),
        ] {
            assert!((fold(k) - want).abs() < 1e-15, "fold({k}) = {}", fold(k));
        }
        let edge = fold(0.499_999_999_999_999_94);
        assert!((-0.5..0.5).contains(&edge));
        let edge = fold(-0.500_000_000_000_000_1);
        assert!((-0.5..0.5).contains(&edge));
    }

    #[test]
    fn node_set_rejects_non_finite() {
        let err = NodeSet::new(2, &[0.0, 0.1, f64::NAN, 0.2]).unwrap_err();
        assert_eq!(err, NfftError::NonFiniteNode { index: 1 });
        let err = NodeSet::new(1, &[0.0, f64::INFINITY]).unwrap_err();
        assert_eq!(err, NfftError::NonFiniteNode { index: 1 });
    }
}
