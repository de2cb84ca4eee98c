use num_complex::Complex64;

const LEAF: usize = 256;

/// Deterministic cascade (pairwise-tree) summation.
///
/// Terms are summed in fixed leaves of 256 and leaves are merged like a binary
/// counter, so the reduction order depends only on the term sequence.
#[derive(Debug, Clone, Default)]
pub struct PairwiseSum {
    leaf: Complex64,
    leaf_len: usize,
    levels: Vec<Option<Complex64>>,
}

impl PairwiseSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: Complex64) {
        self.leaf += v;
        self.leaf_len += 1;
        if self.leaf_len == LEAF {
            let mut carry = std::mem::take(&mut self.leaf);
            self.leaf_len = 0;
            for slot in self.levels.iter_mut() {
                match slot.take() {
                    Some(v) => carry += v,
                    None => {
                        *slot = Some(carry);
                        return;
                    }
                }
            }
            self.levels.push(Some(carry));
        }
    }

    pub fn total(&self) -> Complex64 {
        let mut acc = self.leaf;
        for v in self.levels.iter().flatten() {
            acc += *v;
        }
        acc
    }
}
