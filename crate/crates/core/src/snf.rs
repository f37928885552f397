//! Smith normal form over ℤ with overflow-checked arithmetic.

use crate::error::{Error, Result};

pub type IMat = Vec<Vec<i64>>;

#[derive(Clone, Debug)]
pub struct Smith {
    /// `u · a · v = d`, with `u`, `v` unimodular.
    pub u: IMat,
    pub d: IMat,
    pub v: IMat,
}

fn identity(n: usize) -> IMat {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

fn mul(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b).ok_or(Error::Overflow("smith normal form"))
}

fn sub(a: i64, b: i64) -> Result<i64> {
    a.checked_sub(b).ok_or(Error::Overflow("smith normal form"))
}

// row_i -= q * row_j
fn row_op(m: &mut IMat, i: usize, j: usize, q: i64) -> Result<()> {
    for c in 0..m[0].len() {
        m[i][c] = sub(m[i][c], mul(q, m[j][c])?)?;
    }
    Ok(())
}

fn col_op(m: &mut IMat, i: usize, j: usize, q: i64) -> Result<()> {
    for row in m.iter_mut() {
        row[i] = sub(row[i], mul(q, row[j])?)?;
    }
    Ok(())
}

fn swap_cols(m: &mut IMat, i: usize, j: usize) {
    for row in m.iter_mut() {
        row.swap(i, j);
    }
}

fn negate_row(m: &mut IMat, i: usize) {
    for x in m[i].iter_mut() {
        *x = -*x;
    }
}

pub fn smith_normal_form(a: &IMat) -> Result<Smith> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut d = a.clone();
    let mut u = identity(rows);
    let mut v = identity(cols);
    let mut t = 0;
    while t < rows.min(cols) {
        // Pivot: smallest nonzero absolute value in the remaining block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if d[i][j] != 0 && best.map_or(true, |(bi, bj)| d[i][j].abs() < d[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut d, t, pj);
        swap_cols(&mut v, t, pj);

        let mut clean = true;
        for i in t + 1..rows {
            let q = d[i][t].div_euclid(d[t][t]);
            if q != 0 {
                row_op(&mut d, i, t, q)?;
                row_op(&mut u, i, t, q)?;
            }
            if d[i][t] != 0 {
                clean = false;
            }
        }
        for j in t + 1..cols {
            let q = d[t][j].div_euclid(d[t][t]);
            if q != 0 {
                col_op(&mut d, j, t, q)?;
                col_op(&mut v, j, t, q)?;
            }
            if d[t][j] != 0 {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // Divisibility: fold an offending entry into the pivot row.
        let mut fixed = true;
        'outer: for i in t + 1..rows {
            for j in t + 1..cols {
                if d[i][j] % d[t][t] != 0 {
                    row_op(&mut d, t, i, -1)?;
                    row_op(&mut u, t, i, -1)?;
                    fixed = false;
                    break 'outer;
                }
            }
        }
        if !fixed {
            continue;
        }
        if d[t][t] < 0 {
            negate_row(&mut d, t);
            negate_row(&mut u, t);
        }
        t += 1;
    }
    Ok(Smith { u, d, v })
}

pub fn mat_mul(a: &IMat, b: &IMat) -> Result<IMat> {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    let mut out = vec![vec![0i64; m]; n];
    for i in 0..n {
        for j in 0..m {
            let mut s = 0i64;
            for l in 0..k {
                s = s.checked_add(mul(a[i][l], b[l][j])?).ok_or(Error::Overflow("matrix product"))?;
            }
            out[i][j] = s;
        }
    }
    Ok(out)
}

pub fn det2(m: &[[i64; 2]; 2]) -> Result<i64> {
    sub(mul(m[0][0], m[1][1])?, mul(m[0][1], m[1][0])?)
}
