//! Robust location estimates used to combine elemental estimates.

/// Sample median; mean of the two middle values for even lengths. `None` on
/// empty input.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

/// Least-median-of-squares location: the midpoint of the shortest window of
/// `floor(n/2) + 1` consecutive sorted values. Equal widths resolve to the
/// smallest midpoint. `None` on empty input.
pub fn lms(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let h = v.len() / 2 + 1;
    let mut best: Option<(f64, f64)> = None;
    for w in v.windows(h) {
        let (lo, hi) = (w[0], w[h - 1]);
        let width = hi - lo;
        let mid = (lo + hi) / 2.0;
        let better = match best {
            None => true,
            Some((bw, bm)) => width < bw || (width == bw && mid < bm),
        };
        if better {
            best = Some((width, mid));
        }
    }
    best.map(|(_, mid)| mid)
}
