//! Built-in measurement data.

/// Squeeze displacement (mm) and the three repeated force readings (N) of a
/// three-actuator stack, one row per displacement point.
pub const SQUEEZE_FORCE_TABLE: [(f64, [f64; 3]); 3] = [
    (0.125, [0.2785, 0.2830, 0.2750]),
    (0.250, [0.5260, 0.5250, 0.5273]),
    (0.375, [0.8552, 0.8573, 0.8573]),
];

/// Published averages of [`SQUEEZE_FORCE_TABLE`], rounded to 4 decimals.
pub const SQUEEZE_FORCE_AVERAGES: [(f64, f64); 3] = [(0.125, 0.2788), (0.250, 0.5261), (0.375, 0.8566)];

/// Actuators in the stack used for the table.
pub const SQUEEZE_FORCE_STACK_SIZE: u32 = 3;

/// Mixing parameter reported alongside the table, N·mm⁻²·kV⁻².
pub const REPORTED_MIXING_PARAMETER: f64 = 9.828e-5;

/// Maximum-force envelope reported for a 6 kV pinch, N. Comparison only.
pub const REPORTED_MAX_FORCE_RANGE: (f64, f64) = (2.0, 5.0);

/// Rise time reported for the open-loop step response, ms.
pub const REPORTED_RESPONSE_TIME_MS: f64 = 53.0;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn averages_match_rows() {
        for ((d, row), (da, avg)) in SQUEEZE_FORCE_TABLE.iter().zip(SQUEEZE_FORCE_AVERAGES) {
            assert_eq!(*d, da);
            let mean = row.iter().sum::<f64>() / 3.0;
            assert!((mean - avg).abs() < 5e-5, "{mean} vs {avg}");
        }
    }
}
