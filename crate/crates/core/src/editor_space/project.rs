use crate::scalar::Scalar;

use super::EditorError;

const TOL: f64 = 1e-9;
const MAX_ITER: usize = 1000;

/// Top-2 principal-component projection.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub coords: Vec<[f64; 2]>,
    pub mean: Vec<f64>,
    pub components: [Vec<f64>; 2],
    /// Eigenvalues of the sample covariance (divisor `n - 1`).
    pub eigenvalues: [f64; 2],
}

impl Projection {
    /// Projects a new vector with the fitted mean and components.
    pub fn apply(&self, v: &[f64]) -> [f64; 2] {
        let c: Vec<f64> = v.iter().zip(&self.mean).map(|(x, m)| x - m).collect();
        [dot(&c, &self.components[0]), dot(&c, &self.components[1])]
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn matvec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dot(row, v)).collect()
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Largest-magnitude coordinate made positive.
fn fix_sign(v: &mut [f64]) {
    let mut k = 0;
    for i in 0..v.len() {
        if v[i].abs() > v[k].abs() + 1e-12 {
            k = i;
        }
    }
    if v[k] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Dominant eigenpair of a symmetric PSD matrix, or `None` if it is zero.
fn power_iteration(c: &[Vec<f64>], exclude: Option<&[f64]>) -> Option<(f64, Vec<f64>)> {
    let d = c.len();
    // start from the column with the largest norm
    let start = (0..d).max_by(|&a, &b| {
        let na: f64 = c.iter().map(|r| r[a] * r[a]).sum();
        let nb: f64 = c.iter().map(|r| r[b] * r[b]).sum();
        na.total_cmp(&nb)
    })?;
    let mut v: Vec<f64> = c.iter().map(|r| r[start]).collect();
    // small deterministic tilt so the start is not orthogonal to the top vector
    for (i, x) in v.iter_mut().enumerate() {
        *x += 1e-3 * (1.0 + i as f64).recip();
    }
    let project_out = |v: &mut Vec<f64>| {
        if let Some(u) = exclude {
            let k = dot(v, u);
            v.iter_mut().zip(u).for_each(|(x, y)| *x -= k * y);
        }
    };
    project_out(&mut v);
    if normalize(&mut v) == 0.0 {
        return None;
    }
    for _ in 0..MAX_ITER {
        let mut w = matvec(c, &v);
        project_out(&mut w);
        if normalize(&mut w) < 1e-300 {
            return None;
        }
        let diff: f64 = w.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = w;
        if diff < TOL {
            break;
        }
    }
    let lambda = dot(&v, &matvec(c, &v));
    Some((lambda, v))
}

/// Any unit vector orthogonal to `u`.
fn orthogonal_to(u: &[f64]) -> Vec<f64> {
    for j in 0..u.len() {
        let mut e = vec![0.0; u.len()];
        e[j] = 1.0;
        let k = u[j];
        e.iter_mut().zip(u).for_each(|(x, y)| *x -= k * y);
        if normalize(&mut e) > 1e-6 {
            return e;
        }
    }
    vec![0.0; u.len()]
}

/// Centers the vectors and projects them onto the top two principal
/// components found by power iteration with deflation.
pub fn project_2d<S: Scalar, V: AsRef<[S]>>(vectors: &[V]) -> Result<Projection, EditorError> {
    if vectors.len() < 2 {
        return Err(EditorError::DegenerateInput("need at least 2 vectors".into()));
    }
    let d = vectors[0].as_ref().len();
    let rows: Vec<Vec<f64>> = vectors
        .iter()
        .map(|v| {
            let v = v.as_ref();
            if v.len() != d {
                Err(EditorError::DimMismatch {
                    expected: d,
                    got: v.len(),
                })
            } else {
                Ok(v.iter().map(|x| x.as_f64()).collect())
            }
        })
        .collect::<Result<_, _>>()?;
    let n = rows.len() as f64;
    let mean: Vec<f64> = (0..d).map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n).collect();
    let centered: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| r.iter().zip(&mean).map(|(x, m)| x - m).collect())
        .collect();
    let mut cov = vec![vec![0.0; d]; d];
    for r in &centered {
        for i in 0..d {
            for j in i..d {
                cov[i][j] += r[i] * r[j];
            }
        }
    }
    for i in 0..d {
        for j in i..d {
            cov[i][j] /= n - 1.0;
            cov[j][i] = cov[i][j];
        }
    }
    let trace: f64 = (0..d).map(|i| cov[i][i]).sum();
    if trace <= 1e-300 {
        return Err(EditorError::DegenerateInput("all points identical".into()));
    }
    let (l1, mut v1) = power_iteration(&cov, None)
        .ok_or_else(|| EditorError::DegenerateInput("all points identical".into()))?;
    fix_sign(&mut v1);
    let mut deflated = cov.clone();
    for i in 0..d {
        for j in 0..d {
            deflated[i][j] -= l1 * v1[i] * v1[j];
        }
    }
    let (l2, mut v2) = match power_iteration(&deflated, Some(&v1)) {
        Some((l, v)) if l > trace * 1e-12 => (l, v),
        _ => (0.0, orthogonal_to(&v1)),
    };
    fix_sign(&mut v2);
    let coords = centered.iter().map(|r| [dot(r, &v1), dot(r, &v2)]).collect();
    Ok(Projection {
        coords,
        mean,
        components: [v1, v2],
        eigenvalues: [l1, l2.max(0.0)],
    })
}
