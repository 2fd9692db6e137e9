//! JSON form `{"alphabet_sizes": [...], "weights": [[[...]]]}` with
//! `weights[k][i][j]` the weight from allele `i` of locus `k` to allele `j`
//! of locus `k + 1`.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{GeneSpace, Rggr, RggrError};
use crate::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RggrSnapshot<T> {
    pub alphabet_sizes: Vec<usize>,
    pub weights: Vec<Vec<Vec<T>>>,
}

impl<T: Real> From<&Rggr<T>> for RggrSnapshot<T> {
    fn from(g: &Rggr<T>) -> Self {
        Self {
            alphabet_sizes: g.space().alphabet_sizes().to_vec(),
            weights: g
                .columns()
                .iter()
                .map(|m| m.rows().into_iter().map(|r| r.to_vec()).collect())
                .collect(),
        }
    }
}

impl<T: Real> TryFrom<RggrSnapshot<T>> for Rggr<T> {
    type Error = RggrError;

    fn try_from(snap: RggrSnapshot<T>) -> Result<Self, Self::Error> {
        let space = GeneSpace::new(snap.alphabet_sizes)?;
        let mut columns = Vec::with_capacity(snap.weights.len());
        for (k, rows) in snap.weights.into_iter().enumerate() {
            let ncols = rows.first().map_or(0, Vec::len);
            if rows.iter().any(|r| r.len() != ncols) {
                return Err(RggrError::InvalidSnapshot(format!("column {k} is ragged")));
            }
            let nrows = rows.len();
            let flat: Vec<T> = rows.into_iter().flatten().collect();
            let m =
                Array2::from_shape_vec((nrows, ncols), flat).map_err(|e| RggrError::InvalidSnapshot(e.to_string()))?;
            columns.push(m);
        }
        Rggr::from_weights(space, columns)
    }
}

impl<T: Real> Rggr<T> {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&RggrSnapshot::from(self)).expect("snapshot serializes")
    }

    pub fn from_json(json: &str) -> Result<Self, RggrError> {
        let snap: RggrSnapshot<T> =
            serde_json::from_str(json).map_err(|e| RggrError::InvalidSnapshot(e.to_string()))?;
        snap.try_into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn layout_matches_indexing() {
        let space = GeneSpace::new(vec![2, 3]).unwrap();
        let m = Array2::from_shape_vec((2, 3), vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let g = Rggr::from_weights(space, vec![m]).unwrap();
        assert_eq!(
            g.to_json(),
            r#"{"alphabet_sizes":[2,3],"weights":[[[0.0,1.0,2.0],[3.0,4.0,5.0]]]}"#
        );
    }

    #[test]
    fn malformed_snapshots_are_rejected() {
        assert!(Rggr::<f64>::from_json("{").is_err());
        assert!(Rggr::<f64>::from_json(r#"{"alphabet_sizes":[2,2],"weights":[[[1.0],[1.0,1.0]]]}"#).is_err());
        assert!(Rggr::<f64>::from_json(r#"{"alphabet_sizes":[2,2],"weights":[]}"#).is_err());
        assert!(Rggr::<f64>::from_json(r#"{"alphabet_sizes":[1,1],"weights":[[[-1.0]]]}"#).is_err());
    }

    proptest! {
        #[test]
        fn json_round_trip_is_lossless(
            sizes in prop::collection::vec(1usize..5, 2..5),
            seed in any::<u64>(),
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let space = GeneSpace::new(sizes.clone()).unwrap();
            let cols = sizes
                .windows(2)
                .map(|w| Array2::from_shape_fn((w[0], w[1]), |_| rng.random::<f64>() * 1e3))
                .collect();
            let g = Rggr::from_weights(space, cols).unwrap();
            let back = Rggr::<f64>::from_json(&g.to_json()).unwrap();
            prop_assert_eq!(back, g);
        }
    }
}
