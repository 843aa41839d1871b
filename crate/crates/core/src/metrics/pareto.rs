//! Non-dominated filtering over `(depth, 2q, err)` tuples.

pub type ParetoTuple = [f64; 3];

/// `a` is no worse than `b` everywhere and strictly better somewhere.
pub fn dominates(a: &ParetoTuple, b: &ParetoTuple) -> bool {
    let mut strict = false;
    for r in 0..3 {
        if a[r] > b[r] {
            return false;
        }
        if a[r] < b[r] {
            strict = true;
        }
    }
    strict
}

fn normalize(tuples: &[ParetoTuple]) -> Vec<ParetoTuple> {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for t in tuples {
        for r in 0..3 {
            lo[r] = lo[r].min(t[r]);
            hi[r] = hi[r].max(t[r]);
        }
    }
    tuples
        .iter()
        .map(|t| {
            let mut n = [0.0; 3];
            for r in 0..3 {
                let span = hi[r] - lo[r];
                n[r] = if span > 0.0 { (t[r] - lo[r]) / span } else { 0.0 };
            }
            n
        })
        .collect()
}

/// Indices of non-dominated tuples, ascending.
///
/// Coordinates are min-max normalised over the set, identical normalised
/// vectors are grouped (a surviving group keeps all its members), and an
/// incremental non-dominated set is maintained over the groups.
pub fn pareto_front(tuples: &[ParetoTuple]) -> Vec<usize> {
    if tuples.is_empty() {
        return Vec::new();
    }
    let normed = normalize(tuples);

    let mut groups: Vec<(ParetoTuple, Vec<usize>)> = Vec::new();
    let mut order: Vec<usize> = (0..normed.len()).collect();
    order.sort_by(|&a, &b| {
        normed[a]
            .iter()
            .zip(&normed[b])
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    for i in order {
        match groups.last_mut() {
            Some((key, members)) if *key == normed[i] => members.push(i),
            _ => groups.push((normed[i], vec![i])),
        }
    }

    let mut front: Vec<usize> = Vec::new();
    for g in 0..groups.len() {
        let candidate = &groups[g].0;
        if front.iter().any(|&f| dominates(&groups[f].0, candidate)) {
            continue;
        }
        front.retain(|&f| !dominates(candidate, &groups[f].0));
        front.push(g);
    }

    let mut out: Vec<usize> = front.into_iter().flat_map(|g| groups[g].1.clone()).collect();
    out.sort_unstable();
    out
}
