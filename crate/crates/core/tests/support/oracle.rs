// SPDX-License-Identifier: MIT OR Apache-2.0

//! Naive reference implementation of the KZ rules, written straight from the
//! rule table with `Option<f64>` cells and plain left-to-right sums. It shares
//! no code with the library.

#![allow(dead_code)]

/// Fills every gap of length ≤ `max_gap` and returns the new cells.
/// Each gap only sees originally observed cells and its own fills.
pub fn naive_kz(values: &[Option<f64>], max_gap: usize) -> Vec<Option<f64>> {
    let n = values.len();
    let mut out = values.to_vec();
    let mut i = 0;
    while i < n {
        if values[i].is_some() {
            i += 1;
            continue;
        }
        let start = i;
        while i < n && values[i].is_none() {
            i += 1;
        }
        let end = i; // exclusive
        let len = end - start;
        if len > max_gap || (start == 0 && end == n) {
            continue;
        }
        let mut cells: Vec<Option<f64>> = values.to_vec();
        if start == 0 {
            let k = shoulder(len);
            for c in (start..end).rev() {
                let v = mean(&cells, c + 1, (c + 1 + k).min(n));
                cells[c] = Some(v);
            }
        } else if end == n {
            let k = shoulder(len);
            for c in start..end {
                let v = mean(&cells, c.saturating_sub(k), c);
                cells[c] = Some(v);
            }
        } else {
            middle(&mut cells, start, end);
        }
        out[start..end].copy_from_slice(&cells[start..end]);
    }
    out
}

fn shoulder(len: usize) -> usize {
    if len == 1 {
        3
    } else if len == 2 {
        4
    } else {
        5
    }
}

fn mean(cells: &[Option<f64>], from: usize, to: usize) -> f64 {
    let mut sum = 0.0;
    let mut count = 0;
    for v in cells[from..to].iter().flatten() {
        sum += v;
        count += 1;
    }
    assert!(count > 0, "oracle window {from}..{to} is empty");
    sum / count as f64
}

fn before(cells: &[Option<f64>], c: usize, k: usize) -> f64 {
    mean(cells, c.saturating_sub(k), c)
}

fn after(cells: &[Option<f64>], c: usize, k: usize) -> f64 {
    mean(cells, c + 1, (c + 1 + k).min(cells.len()))
}

fn middle(cells: &mut [Option<f64>], start: usize, end: usize) {
    let len = end - start;
    let last = end - 1;
    match len {
        1 => {
            let v = (cells[start - 1].unwrap() + cells[end].unwrap()) / 2.0;
            cells[start] = Some(v);
        }
        2 => {
            cells[start] = Some(before(cells, start, 3));
            cells[last] = Some(after(cells, last, 3));
        }
        3 => {
            let a = before(cells, start, 5);
            let b = after(cells, last, 5);
            cells[start] = Some(a);
            cells[last] = Some(b);
            cells[start + 1] = Some((a + b) / 2.0);
        }
        4 => {
            cells[start] = Some(before(cells, start, 5));
            cells[start + 1] = Some(before(cells, start + 1, 5));
            cells[last] = Some(after(cells, last, 5));
            cells[last - 1] = Some(after(cells, last - 1, 5));
        }
        _ => {
            cells[start] = Some(before(cells, start, 5));
            cells[last] = Some(after(cells, last, 5));
            // split each span at its midpoint until every cell is filled
            let mut spans = vec![(start, last)];
            while let Some((lo, hi)) = spans.pop() {
                if hi - lo < 2 {
                    continue;
                }
                let v = (cells[lo].unwrap() + cells[hi].unwrap()) / 2.0;
                let inner = hi - lo - 1;
                if inner % 2 == 1 {
                    let m = lo + inner.div_ceil(2);
                    cells[m] = Some(v);
                    spans.push((lo, m));
                    spans.push((m, hi));
                } else {
                    let m1 = lo + inner / 2;
                    cells[m1] = Some(v);
                    cells[m1 + 1] = Some(v);
                    spans.push((lo, m1));
                    spans.push((m1 + 1, hi));
                }
            }
        }
    }
}

/// Relative closeness, measured against the larger of the two values and
/// `scale` (the series magnitude) so values near zero are not over-penalised.
pub fn close(a: f64, b: f64, rel: f64, scale: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(scale)
}
