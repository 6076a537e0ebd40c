//! Conversions between SI and the simulator's canonical units
//! (mm, N, kV, ms, N/mm²).

pub const MM_PER_M: f64 = 1.0e3;
pub const V_PER_KV: f64 = 1.0e3;
pub const MS_PER_S: f64 = 1.0e3;
/// 1 N/mm² = 1 MPa.
pub const PA_PER_N_PER_MM2: f64 = 1.0e6;

/// Vacuum permittivity in F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

pub fn metres_to_mm(m: f64) -> f64 {
    m * MM_PER_M
}

pub fn mm_to_metres(mm: f64) -> f64 {
    mm / MM_PER_M
}

/// Cubic metres to mm³.
pub fn cubic_metres_to_mm3(m3: f64) -> f64 {
    m3 * 1.0e9
}

/// Millilitres to mm³.
pub fn ml_to_mm3(ml: f64) -> f64 {
    ml * 1.0e3
}

pub fn volts_to_kv(v: f64) -> f64 {
    v / V_PER_KV
}

pub fn kv_to_volts(kv: f64) -> f64 {
    kv * V_PER_KV
}

pub fn pascal_to_n_per_mm2(pa: f64) -> f64 {
    pa / PA_PER_N_PER_MM2
}

pub fn n_per_mm2_to_pascal(p: f64) -> f64 {
    p * PA_PER_N_PER_MM2
}

pub fn seconds_to_ms(s: f64) -> f64 {
    s * MS_PER_S
}

pub fn ms_to_seconds(ms: f64) -> f64 {
    ms / MS_PER_S
}

/// Mixing parameter from SI (Pa per V²) to N·mm⁻²·kV⁻².
pub fn mixing_parameter_from_si(k_pa_per_v2: f64) -> f64 {
    pascal_to_n_per_mm2(k_pa_per_v2) * V_PER_KV * V_PER_KV
}
