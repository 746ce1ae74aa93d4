//! The Steenbrink complex with a Kähler form as a bigraded Hodge–Lefschetz structure with
//! differential.

use super::kahler::KahlerForm;
use super::SteenbrinkComplex;
use crate::hlstruct::{HLError, HLStructure};
use crate::linalg::QMatrix;
use std::collections::HashMap;

impl SteenbrinkComplex {
    /// ST^{a,b} sits at H_{-a, d-a-b}; N1 = N, N2 = l, and psi, d carry over unchanged.
    pub fn hl_structure(&self, kf: &KahlerForm) -> Result<HLStructure, HLError> {
        let d = self.d as i64;
        let grid: Vec<(i64, i64)> = self.grid().into_iter().filter(|&(_, b)| b % 2 == 0).collect();
        let mut offset = HashMap::new();
        let mut blocks = Vec::new();
        let mut total = 0;
        for &(a, b) in &grid {
            let n = self.dim(a, b);
            offset.insert((a, b), total);
            blocks.push(((-a, d - a - b), n));
            total += n;
        }
        let mut n1 = QMatrix::zeros(total, total);
        let mut n2 = QMatrix::zeros(total, total);
        let mut psi = QMatrix::zeros(total, total);
        let mut dm = QMatrix::zeros(total, total);
        let place = |m: &mut QMatrix, block: QMatrix, from: (i64, i64), to: (i64, i64), transposed: bool| {
            if let (Some(&s), Some(&t)) = (offset.get(&from), offset.get(&to)) {
                if block.rows() > 0 && block.cols() > 0 {
                    if transposed {
                        m.set_block(s, t, &block);
                    } else {
                        m.set_block(t, s, &block);
                    }
                }
            }
        };
        for &(a, b) in &grid {
            place(&mut n1, self.monodromy(a, b), (a, b), (a + 2, b - 2), false);
            place(&mut n2, self.lefschetz(kf, a, b), (a, b), (a, b + 2), false);
            place(&mut dm, self.differential(a, b), (a, b), (a + 1, b), false);
            place(&mut psi, self.psi(a, b), (a, b), (-a, 2 * d - b), true);
        }
        HLStructure::new(blocks, n1, n2)?.with_psi(psi)?.with_d(dm)
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::build;
    use crate::polyhedral::triangulate::find_strictly_convex_function;
    use crate::tropcoh::tests::{tp1, tp1xtp1, tp2};

    #[test]
    fn harmonic_forms_match_row_cohomology() {
        for y in [tp1(), tp2(), tp1xtp1()] {
            let (_, st) = build(&y);
            let d = st.dimension() as i64;
            let f = find_strictly_convex_function(st.complex()).unwrap();
            let kf = st.kahler_from_function(&f).unwrap();
            let h = st.hl_structure(&kf).unwrap();
            let ax = h.check_axioms();
            assert!(ax.all(), "{ax:?}");
            let w = h.w_report().unwrap();
            assert!(w.all(), "{w:?}");
            let lap = h.laplacian_report().unwrap();
            assert!(lap.all(), "{lap:?}");
            for &(ha, hb, harm, _) in &lap.harmonic {
                // Back to Steenbrink indices: a = -ha, b = d - a - hb.
                let a = -ha;
                let b = d - a - hb;
                assert_eq!(harm, st.row_cohomology((b / 2) as usize)[(a + d) as usize]);
            }
            let c = h.cohomology_hl().unwrap();
            let cax = c.check_axioms();
            assert!(cax.all(), "{cax:?}");
            assert!(c.w_report().unwrap().all());
        }
    }
}
