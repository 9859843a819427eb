//! Independent reference for masked addresses: a depth-first search over all
//! `N^M` words in lexicographic order, keeping a word only while the point
//! lies in the forward image of the unit domain under its composite map.
//! With the tops mask the first complete word found is the masked address.

#![allow(dead_code)]

#[derive(Clone, Copy)]
pub struct Affine<const D: usize> {
    pub lin: [[f64; D]; D],
    pub off: [f64; D],
}

impl<const D: usize> Affine<D> {
    pub fn identity() -> Self {
        let mut lin = [[0.0; D]; D];
        for (k, row) in lin.iter_mut().enumerate() {
            row[k] = 1.0;
        }
        Affine { lin, off: [0.0; D] }
    }

    /// `self ∘ g`.
    pub fn then_inner(&self, g: &Affine<D>) -> Affine<D> {
        let mut lin = [[0.0; D]; D];
        let mut off = self.off;
        for r in 0..D {
            for c in 0..D {
                lin[r][c] = (0..D).map(|k| self.lin[r][k] * g.lin[k][c]).sum();
            }
            off[r] += (0..D).map(|k| self.lin[r][k] * g.off[k]).sum::<f64>();
        }
        Affine { lin, off }
    }

    /// Solves `lin · x = p - off` by Gaussian elimination with partial pivoting.
    pub fn preimage(&self, p: &[f64; D]) -> [f64; D] {
        let mut a = self.lin;
        let mut b = [0.0; D];
        for k in 0..D {
            b[k] = p[k] - self.off[k];
        }
        for col in 0..D {
            let piv = (col..D)
                .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                .unwrap();
            a.swap(col, piv);
            b.swap(col, piv);
            for r in col + 1..D {
                let f = a[r][col] / a[col][col];
                for c in col..D {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
        let mut x = [0.0; D];
        for r in (0..D).rev() {
            let s: f64 = (r + 1..D).map(|c| a[r][c] * x[c]).sum();
            x[r] = (b[r] - s) / a[r][r];
        }
        x
    }

    fn holds(&self, p: &[f64; D], tol: f64) -> bool {
        self.preimage(p).iter().all(|&v| v >= -tol && v <= 1.0 + tol)
    }
}

/// Lexicographically smallest word of length `m` (1-based symbols) whose
/// cell contains `p`, in map order.
pub fn brute_force_address<const D: usize>(
    maps: &[Affine<D>],
    p: &[f64; D],
    m: usize,
    tol: f64,
) -> Option<Vec<u8>> {
    fn dfs<const D: usize>(
        maps: &[Affine<D>],
        p: &[f64; D],
        m: usize,
        tol: f64,
        cell: Affine<D>,
        word: &mut Vec<u8>,
    ) -> bool {
        if word.len() == m {
            return true;
        }
        for (i, f) in maps.iter().enumerate() {
            let next = cell.then_inner(f);
            if next.holds(p, tol) {
                word.push(i as u8 + 1);
                if dfs(maps, p, m, tol, next, word) {
                    return true;
                }
                word.pop();
            }
        }
        false
    }
    let mut word = Vec::with_capacity(m);
    dfs(maps, p, m, tol, Affine::identity(), &mut word).then_some(word)
}

/// `g_1 … g_4` of the four-map split at `(a, b)`, written out by hand.
pub fn quad_maps(a: f64, b: f64) -> Vec<Affine<2>> {
    let m = |sx: f64, sy: f64, ox: f64, oy: f64| Affine {
        lin: [[sx, 0.0], [0.0, sy]],
        off: [ox, oy],
    };
    vec![
        m(a, b, 0.0, 0.0),
        m(1.0 - a, b, a, 0.0),
        m(1.0 - a, 1.0 - b, a, b),
        m(a, 1.0 - b, 0.0, b),
    ]
}

/// The eight-map split of the cube at `s`, corner `i` chosen by the bits of
/// `i - 1`.
pub fn corner_maps(s: [f64; 3]) -> Vec<Affine<3>> {
    (0..8)
        .map(|i| {
            let mut lin = [[0.0; 3]; 3];
            let mut off = [0.0; 3];
            for k in 0..3 {
                if (i >> k) & 1 == 0 {
                    lin[k][k] = s[k];
                } else {
                    lin[k][k] = 1.0 - s[k];
                    off[k] = s[k];
                }
            }
            Affine { lin, off }
        })
        .collect()
}
