use serde::{Deserialize, Serialize};

use super::RggrError;

/// Shape of the search space: one alphabet per locus.
///
/// Locus `k` takes allele indices in `0..alphabet_sizes[k]`. At least two
/// loci are required so that the graph has one edge column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct GeneSpace {
    alphabet_sizes: Vec<usize>,
}

impl GeneSpace {
    pub fn new(alphabet_sizes: Vec<usize>) -> Result<Self, RggrError> {
        if alphabet_sizes.len() < 2 {
            return Err(RggrError::TooFewLoci(alphabet_sizes.len()));
        }
        if let Some(locus) = alphabet_sizes.iter().position(|&n| n == 0) {
            return Err(RggrError::EmptyAlphabet { locus });
        }
        Ok(Self { alphabet_sizes })
    }

    /// `num_loci` loci sharing one alphabet of size `alphabet`.
    pub fn uniform(num_loci: usize, alphabet: usize) -> Result<Self, RggrError> {
        Self::new(vec![alphabet; num_loci])
    }

    pub fn num_loci(&self) -> usize {
        self.alphabet_sizes.len()
    }

    /// Number of edge columns, i.e. candidate crossover/mutation loci.
    pub fn num_edge_columns(&self) -> usize {
        self.alphabet_sizes.len() - 1
    }

    pub fn alphabet_size(&self, locus: usize) -> usize {
        self.alphabet_sizes[locus]
    }

    pub fn alphabet_sizes(&self) -> &[usize] {
        &self.alphabet_sizes
    }

    /// Checks that `chromosome` has one in-range allele per locus.
    pub fn check(&self, chromosome: &Chromosome) -> Result<(), RggrError> {
        if chromosome.len() != self.num_loci() {
            return Err(RggrError::LengthMismatch {
                expected: self.num_loci(),
                found: chromosome.len(),
            });
        }
        for (locus, (&gene, &n)) in chromosome.genes().iter().zip(&self.alphabet_sizes).enumerate() {
            if gene >= n {
                return Err(RggrError::GeneOutOfRange {
                    locus,
                    gene,
                    alphabet: n,
                });
            }
        }
        Ok(())
    }
}

impl TryFrom<Vec<usize>> for GeneSpace {
    type Error = RggrError;

    fn try_from(sizes: Vec<usize>) -> Result<Self, Self::Error> {
        Self::new(sizes)
    }
}

impl From<GeneSpace> for Vec<usize> {
    fn from(space: GeneSpace) -> Self {
        space.alphabet_sizes
    }
}

/// A candidate solution: one allele index per locus.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Chromosome(Vec<usize>);

impl Chromosome {
    pub fn new(genes: Vec<usize>) -> Self {
        Self(genes)
    }

    pub fn genes(&self) -> &[usize] {
        &self.0
    }

    pub fn genes_mut(&mut self) -> &mut [usize] {
        &mut self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The `(from, to)` allele pair this chromosome uses in edge column `column`.
    pub fn edge(&self, column: usize) -> (usize, usize) {
        (self.0[column], self.0[column + 1])
    }

    pub fn into_genes(self) -> Vec<usize> {
        self.0
    }
}

impl From<Vec<usize>> for Chromosome {
    fn from(genes: Vec<usize>) -> Self {
        Self(genes)
    }
}
