//! Smith normal form over the integers, with unimodular transforms.

pub type IntMatrix = Vec<Vec<i64>>;

/// `left * a * right == diag(d)` with `d` a divisor chain of nonnegative
/// entries, zeros last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Smith {
    pub rows: usize,
    pub cols: usize,
    pub diag: Vec<i64>,
    pub left: IntMatrix,
    pub right: IntMatrix,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diag.iter().filter(|&&d| d != 0).count()
    }
}

fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix, inner: usize, cols: usize) -> IntMatrix {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn smith_normal_form(a: &IntMatrix, cols: usize) -> Smith {
    let rows = a.len();
    let mut m = a.clone();
    let mut left = identity(rows);
    let mut right = identity(cols);

    let swap_rows = |m: &mut IntMatrix, l: &mut IntMatrix, i: usize, j: usize| {
        m.swap(i, j);
        l.swap(i, j);
    };
    let swap_cols = |m: &mut IntMatrix, r: &mut IntMatrix, i: usize, j: usize| {
        for row in m.iter_mut() {
            row.swap(i, j);
        }
        for row in r.iter_mut() {
            row.swap(i, j);
        }
    };
    // row_i -= q * row_t
    let row_op = |m: &mut IntMatrix, l: &mut IntMatrix, i: usize, t: usize, q: i64| {
        for j in 0..m[i].len() {
            m[i][j] -= q * m[t][j];
        }
        for j in 0..l[i].len() {
            l[i][j] -= q * l[t][j];
        }
    };
    // col_j -= q * col_t
    let col_op = |m: &mut IntMatrix, r: &mut IntMatrix, j: usize, t: usize, q: i64| {
        for row in m.iter_mut() {
            row[j] -= q * row[t];
        }
        for row in r.iter_mut() {
            row[j] -= q * row[t];
        }
    };

    for t in 0..rows.min(cols) {
        loop {
            // smallest nonzero entry in the trailing block
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if m[i][j] != 0
                        && pivot.is_none_or(|(pi, pj)| m[i][j].abs() < m[pi][pj].abs())
                    {
                        pivot = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                break;
            };
            swap_rows(&mut m, &mut left, t, pi);
            swap_cols(&mut m, &mut right, t, pj);
            let mut clean = true;
            for i in (t + 1)..rows {
                let q = m[i][t].div_euclid(m[t][t]);
                row_op(&mut m, &mut left, i, t, q);
                clean &= m[i][t] == 0;
            }
            for j in (t + 1)..cols {
                let q = m[t][j].div_euclid(m[t][t]);
                col_op(&mut m, &mut right, j, t, q);
                clean &= m[t][j] == 0;
            }
            if !clean {
                continue;
            }
            // divisibility of the trailing block
            let d = m[t][t];
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| m[i][j] % d != 0));
            match bad {
                Some(i) => row_op(&mut m, &mut left, t, i, -1),
                None => break,
            }
        }
        if m[t][t] < 0 {
            for x in m[t].iter_mut() {
                *x = -*x;
            }
            for x in left[t].iter_mut() {
                *x = -*x;
            }
        }
    }
    let diag = (0..rows.min(cols)).map(|i| m[i][i]).collect();
    Smith {
        rows,
        cols,
        diag,
        left,
        right,
    }
}

/// Integer row vectors `v` with `v * a == 0` (a basis of the left kernel).
pub fn left_kernel(a: &IntMatrix, cols: usize) -> IntMatrix {
    let s = smith_normal_form(a, cols);
    let r = s.rank();
    s.left[r..].to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(a: IntMatrix, cols: usize) -> Smith {
        let s = smith_normal_form(&a, cols);
        let rows = a.len();
        let pa = mat_mul(&s.left, &a, rows, cols);
        let paq = mat_mul(&pa, &s.right, cols, cols);
        for i in 0..rows {
            for j in 0..cols {
                let want = if i == j { s.diag[i] } else { 0 };
                assert_eq!(paq[i][j], want, "entry {i},{j}");
            }
        }
        for w in s.diag.windows(2) {
            if w[1] != 0 {
                assert_eq!(w[1] % w[0], 0);
            }
        }
        s
    }

    #[test]
    fn known_forms() {
        assert_eq!(check(vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]], 3).diag, vec![2, 6, 12]);
        assert_eq!(check(vec![vec![2]], 1).diag, vec![2]);
        assert_eq!(check(vec![vec![-1]], 1).diag, vec![1]);
        assert_eq!(check(vec![vec![2, 0], vec![0, 3]], 2).diag, vec![1, 6]);
        assert!(check(vec![], 2).diag.is_empty());
        assert_eq!(check(vec![vec![0, 0]], 2).diag, vec![0]);
    }

    #[test]
    fn kernel() {
        let a = vec![vec![1, 2], vec![2, 4], vec![0, 1]];
        for v in left_kernel(&a, 2) {
            assert_eq!(mat_mul(&vec![v], &a, 3, 2)[0], vec![0, 0]);
        }
        assert_eq!(left_kernel(&a, 2).len(), 1);
    }
}
