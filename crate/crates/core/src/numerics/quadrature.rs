use super::grid::GridFunction;

/// Running integral `F(η_i) = ∫₀^{η_i} f` on the grid of `f`.
///
/// Even nodes use composite Simpson over node pairs. An odd node takes the
/// Simpson sum up to the previous even node plus the integral of the
/// quadratic through the surrounding three nodes over the last panel, so
/// every node is fourth-order accurate for smooth `f`. That single-panel
/// piece is limited to `[0, pair]` so that a non-negative integrand always
/// gives a non-decreasing result, even on under-resolved data. With only two
/// nodes the trapezoid rule is used.
pub fn cumulative_integral(f: &GridFunction) -> GridFunction {
    let v = f.values();
    let n = v.len();
    let h = f.step();
    let mut out = vec![0.0; n];
    if n == 2 {
        out[1] = 0.5 * h * (v[0] + v[1]);
        return GridFunction::from_parts_unchecked(f.lambda(), out);
    }

    let mut i = 0;
    while i + 2 < n {
        let pair = h / 3.0 * (v[i] + 4.0 * v[i + 1] + v[i + 2]);
        let mut left = h / 12.0 * (5.0 * v[i] + 8.0 * v[i + 1] - v[i + 2]);
        if pair >= 0.0 {
            left = left.clamp(0.0, pair);
        }
        out[i + 1] = out[i] + left;
        out[i + 2] = out[i] + pair;
        i += 2;
    }
    if i + 1 < n {
        // odd number of panels: close with the right-panel quadratic rule
        let mut last = h / 12.0 * (-v[i - 1] + 8.0 * v[i] + 5.0 * v[i + 1]);
        if v[i] >= 0.0 && v[i + 1] >= 0.0 {
            last = last.max(0.0);
        }
        out[i + 1] = out[i] + last;
    }
    GridFunction::from_parts_unchecked(f.lambda(), out)
}

/// `∫₀^λ f`, the last value of [`cumulative_integral`].
pub fn integrate(f: &GridFunction) -> f64 {
    *cumulative_integral(f)
        .values()
        .last()
        .expect("grid has >= 2 nodes")
}
