use super::IntMatrix;

/// U·A·V = D with U, V unimodular and D diagonal, d_1 | d_2 | … and d_i ≥ 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub d: Vec<i64>,
    pub v: IntMatrix,
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let n = a.len();
    let mut m: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut u: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect();
    let mut v = u.clone();

    for t in 0..n {
        let Some((pi, pj)) = min_entry(&m, t) else { break };
        m.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut m, t, pj);
        swap_cols(&mut v, t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..n {
                let q = m[i][t].div_euclid(m[t][t]);
                if q != 0 {
                    row_axpy(&mut m, i, t, -q);
                    row_axpy(&mut u, i, t, -q);
                }
                clean &= m[i][t] == 0;
            }
            for j in t + 1..n {
                let q = m[t][j].div_euclid(m[t][t]);
                if q != 0 {
                    col_axpy(&mut m, j, t, -q);
                    col_axpy(&mut v, j, t, -q);
                }
                clean &= m[t][j] == 0;
            }
            if !clean {
                let (pi, pj) = min_in_cross(&m, t);
                m.swap(t, pi);
                u.swap(t, pi);
                swap_cols(&mut m, t, pj);
                swap_cols(&mut v, t, pj);
                continue;
            }
            let p = m[t][t];
            let bad = (t + 1..n).find(|&i| (t + 1..n).any(|j| m[i][j] % p != 0));
            match bad {
                Some(i) => {
                    row_axpy(&mut m, t, i, 1);
                    row_axpy(&mut u, t, i, 1);
                }
                None => break,
            }
        }
        if m[t][t] < 0 {
            for x in m[t].iter_mut() {
                *x = -*x;
            }
            for x in u[t].iter_mut() {
                *x = -*x;
            }
        }
    }
    let narrow = |x: Vec<Vec<i128>>| -> IntMatrix {
        x.into_iter().map(|r| r.into_iter().map(|e| i64::try_from(e).expect("smith entry fits")).collect()).collect()
    };
    let d = (0..n).map(|i| i64::try_from(m[i][i]).expect("smith entry fits")).collect();
    SmithForm { u: narrow(u), d, v: narrow(v) }
}

fn min_entry(m: &[Vec<i128>], t: usize) -> Option<(usize, usize)> {
    let n = m.len();
    let mut best: Option<(usize, usize)> = None;
    for i in t..n {
        for j in t..n {
            if m[i][j] != 0 && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

fn min_in_cross(m: &[Vec<i128>], t: usize) -> (usize, usize) {
    let n = m.len();
    let mut best = (t, t);
    for i in t..n {
        if m[i][t] != 0 && m[i][t].abs() < m[best.0][best.1].abs() {
            best = (i, t);
        }
    }
    for j in t..n {
        if m[t][j] != 0 && m[t][j].abs() < m[best.0][best.1].abs() {
            best = (t, j);
        }
    }
    best
}

fn swap_cols(m: &mut [Vec<i128>], a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// row_dst += k·row_src
fn row_axpy(m: &mut [Vec<i128>], dst: usize, src: usize, k: i128) {
    let src_row = m[src].clone();
    for (x, s) in m[dst].iter_mut().zip(src_row) {
        *x += k * s;
    }
}

/// col_dst += k·col_src
fn col_axpy(m: &mut [Vec<i128>], dst: usize, src: usize, k: i128) {
    for row in m.iter_mut() {
        row[dst] += k * row[src];
    }
}
