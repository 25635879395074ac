//! Exhaustive enumeration of integer points near a real-valued center.

/// All lattice points `x` with `sum w_i (x_i - c_i)^2 <= r^2`.
pub fn in_ellipsoid(center: &[f64], weights: &[f64], r: f64) -> Vec<Vec<i32>> {
    fn rec(i: usize, c: &[f64], w: &[f64], left: f64, cur: &mut Vec<i32>, out: &mut Vec<Vec<i32>>) {
        if i == c.len() {
            out.push(cur.clone());
            return;
        }
        let span = (left / w[i]).max(0.0).sqrt();
        let lo = (c[i] - span).ceil() as i32;
        let hi = (c[i] + span).floor() as i32;
        for v in lo..=hi {
            let used = w[i] * (v as f64 - c[i]).powi(2);
            if used <= left + 1e-9 {
                cur.push(v);
                rec(i + 1, c, w, left - used, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(0, center, weights, r * r, &mut Vec::new(), &mut out);
    out
}

/// All lattice points with `|x_i - c_i| <= radii_i` for every `i`, or `None`
/// if there are more than `cap`.
pub fn in_box(center: &[f64], radii: &[f64], cap: usize) -> Option<Vec<Vec<i32>>> {
    let ranges: Vec<Vec<i32>> = center
        .iter()
        .zip(radii)
        .map(|(&c, &r)| ((c - r - 1e-9).ceil() as i32..=(c + r + 1e-9).floor() as i32).collect())
        .collect();
    let total = ranges.iter().try_fold(1usize, |acc, r| acc.checked_mul(r.len()))?;
    if total > cap {
        return None;
    }
    let mut out = vec![Vec::with_capacity(center.len())];
    for r in &ranges {
        out = out
            .into_iter()
            .flat_map(|p| {
                r.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    Some(out)
}
