//! Exact Euclidean distance transform.
//!
//! Separable lower-envelope algorithm (Felzenszwalb & Huttenlocher): a column
//! pass followed by a row pass over squared distances. Squared distances
//! between cell centres are integers, so the result is exact in `f64`.

/// Squared distance (in cells) from every cell to the nearest site.
/// Cells are row-major `width x height`. Returns `f64::INFINITY` everywhere
/// when there is no site.
pub fn squared_distance_transform(
    width: usize,
    height: usize,
    is_site: impl Fn(usize) -> bool,
) -> Vec<f64> {
    let n = width * height;
    let mut grid: Vec<f64> = (0..n)
        .map(|i| if is_site(i) { 0.0 } else { f64::INFINITY })
        .collect();

    let longest = width.max(height);
    let mut f = vec![0.0; longest];
    let mut out = vec![0.0; longest];
    let mut v = vec![0usize; longest];
    let mut z = vec![0.0; longest + 1];

    for x in 0..width {
        for y in 0..height {
            f[y] = grid[y * width + x];
        }
        transform_1d(&f[..height], &mut out[..height], &mut v, &mut z);
        for y in 0..height {
            grid[y * width + x] = out[y];
        }
    }
    for y in 0..height {
        let row = &mut grid[y * width..(y + 1) * width];
        f[..width].copy_from_slice(row);
        transform_1d(&f[..width], &mut out[..width], &mut v, &mut z);
        row.copy_from_slice(&out[..width]);
    }
    grid
}

/// Euclidean distance in metres to the nearest site; `resolution` is metres per cell.
pub fn distance_transform(
    width: usize,
    height: usize,
    resolution: f64,
    is_site: impl Fn(usize) -> bool,
) -> Vec<f64> {
    let mut d = squared_distance_transform(width, height, is_site);
    for v in &mut d {
        *v = v.sqrt() * resolution;
    }
    d
}

fn transform_1d(f: &[f64], out: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    let Some(first) = f.iter().position(|x| x.is_finite()) else {
        out.fill(f64::INFINITY);
        return;
    };
    let parabola = |q: usize| f[q] + (q * q) as f64;

    let mut k = 0usize;
    v[0] = first;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in first + 1..n {
        if !f[q].is_finite() {
            continue;
        }
        let mut s;
        loop {
            let p = v[k];
            s = (parabola(q) - parabola(p)) / (2.0 * (q as f64 - p as f64));
            if s <= z[k] {
                // z[0] is -inf, so k never underflows.
                k -= 1;
            } else {
                break;
            }
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }

    k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let d = q as f64 - v[k] as f64;
        *o = d * d + f[v[k]];
    }
}
