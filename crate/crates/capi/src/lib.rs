//! C ABI for the widescan library.
//!
//! The surface follows the usual handle/status-code pattern: opaque
//! pointers own Rust objects, every fallible call returns a [`WsStatus`],
//! results travel through caller-allocated output buffers, and the last
//! error message is kept per thread for diagnostics. The companion header
//! `include/widescan.h` is generated by cbindgen at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use widescan::array::{ArrayGeometry, ArrayModel, Direction, ExcitationSet, PhysicsConstants};
use widescan::baseline::std_weights;
use widescan::cli::RunConfig;
use widescan::io::{analytic_patterns, synthetic_coupling, AnalyticPatternKind, SyntheticCouplingSpec};
use widescan::moea::MoeaConfig;
use widescan::synthesis::{
    select_tradeoff, synthesize_scan_angle, FeasibilitySpec, ScanSynthesis, Selected,
    SelectionCriterion,
};

/// Status code returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Utf8 = 3,
    Config = 4,
    Ingestion = 5,
    Physics = 6,
    Synthesis = 7,
    Panic = 8,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn fail(status: WsStatus, message: &str) -> WsStatus {
    set_error(message);
    status
}

fn guard(body: impl FnOnce() -> WsStatus) -> WsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(WsStatus::Panic, "internal panic crossed the FFI boundary"),
    }
}

/// Message describing the most recent failure on this thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ws_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Opaque array model handle.
pub struct WsModel {
    inner: ArrayModel,
}

/// Opaque synthesis result: the Pareto archive for one scan angle plus the
/// baseline reference it was normalized against.
pub struct WsArchive {
    synthesis: ScanSynthesis,
    feasibility: FeasibilitySpec,
}

/// Optimizer controls for [`ws_synthesize`]. Zero/negative values select
/// the documented defaults where noted.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct WsMoeaParams {
    /// Population size P (reference value: 50).
    pub population: usize,
    /// Iteration budget C (reference value: 1000).
    pub iterations: u64,
    /// SBX distribution index; values <= 0 mean 15.
    pub eta_crossover: f64,
    /// Polynomial-mutation distribution index; values <= 0 mean 20.
    pub eta_mutation: f64,
    /// Per-variable mutation probability; values outside (0, 1] mean 1/n.
    pub mutation_probability: f64,
    /// Archive box size for the reflected-power objective.
    pub epsilon_refl: f64,
    /// Archive box size for the radiation objective (normalized by the
    /// baseline value).
    pub epsilon_rad: f64,
    /// Master RNG seed.
    pub seed: u64,
    /// RNG stream, e.g. the scan index during a sweep.
    pub stream: u64,
    /// Phase quantization step in degrees; <= 0 disables quantization.
    pub phase_quantization_deg: f64,
}

impl WsMoeaParams {
    fn to_config(self) -> MoeaConfig {
        MoeaConfig {
            population_size: self.population,
            iterations: self.iterations,
            eta_crossover: if self.eta_crossover > 0.0 {
                self.eta_crossover
            } else {
                15.0
            },
            eta_mutation: if self.eta_mutation > 0.0 {
                self.eta_mutation
            } else {
                20.0
            },
            mutation_probability: if self.mutation_probability > 0.0
                && self.mutation_probability <= 1.0
            {
                Some(self.mutation_probability)
            } else {
                None
            },
            seed: self.seed,
        }
    }
}

unsafe fn model_ref<'a>(model: *const WsModel) -> Option<&'a ArrayModel> {
    model.as_ref().map(|m| &m.inner)
}

unsafe fn weights_from_raw(re: *const f64, im: *const f64, len: usize) -> Option<Vec<Complex64>> {
    if re.is_null() || im.is_null() {
        return None;
    }
    let re = std::slice::from_raw_parts(re, len);
    let im = std::slice::from_raw_parts(im, len);
    Some(
        re.iter()
            .zip(im)
            .map(|(r, i)| Complex64::new(*r, *i))
            .collect(),
    )
}

fn excitation(model: &ArrayModel, weights: Vec<Complex64>) -> Result<ExcitationSet, String> {
    if weights.len() != model.len() {
        return Err(format!(
            "expected {} weights, got {}",
            model.len(),
            weights.len()
        ));
    }
    ExcitationSet::magnitude_phase(weights, Direction::new(90.0, 0.0)).map_err(|e| e.to_string())
}

/// Builds a model from a run-configuration file (same TOML schema as the
/// CLI). Relative data paths resolve against the config file's directory.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer; the
/// returned handle must be released with [`ws_model_free`].
#[no_mangle]
pub unsafe extern "C" fn ws_model_from_config(
    path: *const c_char,
    out: *mut *mut WsModel,
) -> WsStatus {
    guard(|| {
        if path.is_null() || out.is_null() {
            return fail(WsStatus::NullPointer, "null path or output pointer");
        }
        let path = match CStr::from_ptr(path).to_str() {
            Ok(p) => Path::new(p),
            Err(_) => return fail(WsStatus::Utf8, "path is not valid UTF-8"),
        };
        let config = match RunConfig::from_path(path) {
            Ok(c) => c,
            Err(e) => return fail(WsStatus::Config, &e.to_string()),
        };
        let base = path.parent().unwrap_or(Path::new("."));
        match config.build_model(base) {
            Ok((model, _warnings)) => {
                *out = Box::into_raw(Box::new(WsModel { inner: model }));
                WsStatus::Ok
            }
            Err(e) => fail(WsStatus::Ingestion, &e.to_string()),
        }
    })
}

/// Builds a linear fixture along y: synthetic exponential-decay coupling
/// and isotropic element patterns tabulated at one degree.
///
/// # Safety
/// `out` must be a valid pointer; release the handle with
/// [`ws_model_free`].
#[no_mangle]
pub unsafe extern "C" fn ws_model_linear_synthetic(
    count: usize,
    spacing_wavelengths: f64,
    frequency_hz: f64,
    gamma_re: f64,
    gamma_im: f64,
    coupling_amplitude: f64,
    decay_length_wavelengths: f64,
    out: *mut *mut WsModel,
) -> WsStatus {
    guard(|| {
        if out.is_null() {
            return fail(WsStatus::NullPointer, "null output pointer");
        }
        let constants = PhysicsConstants::default();
        let lambda = constants.speed_of_light_m_s / frequency_hz;
        let geometry = match ArrayGeometry::linear(
            count,
            spacing_wavelengths * lambda,
            frequency_hz,
            &constants,
        ) {
            Ok(g) => g,
            Err(e) => return fail(WsStatus::InvalidArgument, &e.to_string()),
        };
        let spec = SyntheticCouplingSpec {
            self_reflection: (gamma_re, gamma_im),
            coupling_amplitude,
            decay_length_m: decay_length_wavelengths * lambda,
        };
        let scattering = match synthetic_coupling(&geometry, &spec) {
            Ok(s) => s,
            Err(e) => return fail(WsStatus::InvalidArgument, &e.to_string()),
        };
        let patterns = match analytic_patterns(
            AnalyticPatternKind::Isotropic,
            &geometry,
            1.0,
            1.0,
            [1.0, 0.0, 0.0],
        ) {
            Ok(p) => p,
            Err(e) => return fail(WsStatus::InvalidArgument, &e.to_string()),
        };
        match ArrayModel::new(geometry, scattering, patterns, constants) {
            Ok(model) => {
                *out = Box::into_raw(Box::new(WsModel { inner: model }));
                WsStatus::Ok
            }
            Err(e) => fail(WsStatus::InvalidArgument, &e.to_string()),
        }
    })
}

/// # Safety
/// `model` must be a handle from a `ws_model_*` constructor or null.
#[no_mangle]
pub unsafe extern "C" fn ws_model_free(model: *mut WsModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of array elements, or 0 for a null handle.
///
/// # Safety
/// `model` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ws_model_element_count(model: *const WsModel) -> usize {
    model_ref(model).map(|m| m.len()).unwrap_or(0)
}

/// Linear-phase baseline weights toward `(theta, phi)` degrees. `re`/`im`
/// must hold `ws_model_element_count` values.
///
/// # Safety
/// All pointers must be valid; the output buffers must hold N values.
#[no_mangle]
pub unsafe extern "C" fn ws_std_weights(
    model: *const WsModel,
    theta_deg: f64,
    phi_deg: f64,
    re: *mut f64,
    im: *mut f64,
) -> WsStatus {
    guard(|| {
        let Some(model) = model_ref(model) else {
            return fail(WsStatus::NullPointer, "null model");
        };
        if re.is_null() || im.is_null() {
            return fail(WsStatus::NullPointer, "null output buffer");
        }
        match std_weights(model.geometry(), Direction::new(theta_deg, phi_deg)) {
            Ok(exc) => {
                let re = std::slice::from_raw_parts_mut(re, model.len());
                let im = std::slice::from_raw_parts_mut(im, model.len());
                for (k, w) in exc.weights().iter().enumerate() {
                    re[k] = w.re;
                    im[k] = w.im;
                }
                WsStatus::Ok
            }
            Err(e) => fail(WsStatus::Physics, &e.to_string()),
        }
    })
}

/// Total reflected power fraction ζ for the given incident weights.
///
/// # Safety
/// `re`/`im` must point to `len` readable values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ws_reflected_power_fraction(
    model: *const WsModel,
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut f64,
) -> WsStatus {
    guard(|| {
        let Some(model) = model_ref(model) else {
            return fail(WsStatus::NullPointer, "null model");
        };
        if out.is_null() {
            return fail(WsStatus::NullPointer, "null output pointer");
        }
        let Some(weights) = weights_from_raw(re, im, len) else {
            return fail(WsStatus::NullPointer, "null weight buffer");
        };
        let exc = match excitation(model, weights) {
            Ok(e) => e,
            Err(m) => return fail(WsStatus::InvalidArgument, &m),
        };
        match model.scattering().reflected_power_fraction(&exc) {
            Ok(zeta) => {
                *out = zeta;
                WsStatus::Ok
            }
            Err(e) => fail(WsStatus::Physics, &e.to_string()),
        }
    })
}

/// Radiated power density toward `(theta, phi)` degrees, watts/steradian.
///
/// # Safety
/// `re`/`im` must point to `len` readable values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ws_power_density(
    model: *const WsModel,
    re: *const f64,
    im: *const f64,
    len: usize,
    theta_deg: f64,
    phi_deg: f64,
    out: *mut f64,
) -> WsStatus {
    guard(|| {
        let Some(model) = model_ref(model) else {
            return fail(WsStatus::NullPointer, "null model");
        };
        if out.is_null() {
            return fail(WsStatus::NullPointer, "null output pointer");
        }
        let Some(weights) = weights_from_raw(re, im, len) else {
            return fail(WsStatus::NullPointer, "null weight buffer");
        };
        let exc = match excitation(model, weights) {
            Ok(e) => e,
            Err(m) => return fail(WsStatus::InvalidArgument, &m),
        };
        match model.power_density(&exc, Direction::new(theta_deg, phi_deg)) {
            Ok(psi) => {
                *out = psi;
                WsStatus::Ok
            }
            Err(e) => fail(WsStatus::Physics, &e.to_string()),
        }
    })
}

/// Active reflection coefficient of one element under the given weights.
///
/// # Safety
/// `re`/`im` must point to `len` readable values; outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn ws_active_reflection(
    model: *const WsModel,
    re: *const f64,
    im: *const f64,
    len: usize,
    element: usize,
    out_re: *mut f64,
    out_im: *mut f64,
) -> WsStatus {
    guard(|| {
        let Some(model) = model_ref(model) else {
            return fail(WsStatus::NullPointer, "null model");
        };
        if out_re.is_null() || out_im.is_null() {
            return fail(WsStatus::NullPointer, "null output pointer");
        }
        if element >= model.len() {
            return fail(WsStatus::InvalidArgument, "element index out of range");
        }
        let Some(weights) = weights_from_raw(re, im, len) else {
            return fail(WsStatus::NullPointer, "null weight buffer");
        };
        let exc = match excitation(model, weights) {
            Ok(e) => e,
            Err(m) => return fail(WsStatus::InvalidArgument, &m),
        };
        match model.scattering().active_reflection(&exc, element) {
            Ok(gamma) => {
                *out_re = gamma.re;
                *out_im = gamma.im;
                WsStatus::Ok
            }
            Err(e) => fail(WsStatus::Physics, &e.to_string()),
        }
    })
}

/// Runs the per-scan-angle synthesis and returns the Pareto archive.
/// Phase-only feasibility, optionally quantized through the params.
///
/// # Safety
/// `params` and `out` must be valid pointers; release the archive with
/// [`ws_archive_free`].
#[no_mangle]
pub unsafe extern "C" fn ws_synthesize(
    model: *const WsModel,
    theta_deg: f64,
    phi_deg: f64,
    params: *const WsMoeaParams,
    out: *mut *mut WsArchive,
) -> WsStatus {
    guard(|| {
        let Some(model) = model_ref(model) else {
            return fail(WsStatus::NullPointer, "null model");
        };
        if params.is_null() || out.is_null() {
            return fail(WsStatus::NullPointer, "null params or output pointer");
        }
        let params = *params;
        if !(params.epsilon_refl > 0.0) || !(params.epsilon_rad > 0.0) {
            return fail(WsStatus::InvalidArgument, "epsilon values must be positive");
        }
        let mut feasibility = FeasibilitySpec::phase_only();
        if params.phase_quantization_deg > 0.0 {
            feasibility = feasibility.with_phase_quantization(params.phase_quantization_deg);
        }
        let config = params.to_config();
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        rng.set_stream(params.stream);
        match synthesize_scan_angle(
            model,
            Direction::new(theta_deg, phi_deg),
            &feasibility,
            &config,
            [params.epsilon_refl, params.epsilon_rad],
            rng,
            &[],
        ) {
            Ok(synthesis) => {
                *out = Box::into_raw(Box::new(WsArchive {
                    synthesis,
                    feasibility,
                }));
                WsStatus::Ok
            }
            Err(e) => fail(WsStatus::Synthesis, &e.to_string()),
        }
    })
}

/// # Safety
/// `archive` must be a handle from [`ws_synthesize`] or null.
#[no_mangle]
pub unsafe extern "C" fn ws_archive_free(archive: *mut WsArchive) {
    if !archive.is_null() {
        drop(Box::from_raw(archive));
    }
}

/// Number of archive members.
///
/// # Safety
/// `archive` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ws_archive_len(archive: *const WsArchive) -> usize {
    archive
        .as_ref()
        .map(|a| a.synthesis.archive.len())
        .unwrap_or(0)
}

/// Objectives `[Φ_REFL, Φ_RAD]` of member `index`.
///
/// # Safety
/// `out` must point to two writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ws_archive_objectives(
    archive: *const WsArchive,
    index: usize,
    out: *mut f64,
) -> WsStatus {
    guard(|| {
        let Some(archive) = archive.as_ref() else {
            return fail(WsStatus::NullPointer, "null archive");
        };
        if out.is_null() {
            return fail(WsStatus::NullPointer, "null output pointer");
        }
        if index >= archive.synthesis.archive.len() {
            return fail(WsStatus::InvalidArgument, "archive index out of range");
        }
        let objectives = archive.synthesis.archive.entry(index).objectives;
        let out = std::slice::from_raw_parts_mut(out, 2);
        out[0] = objectives[0];
        out[1] = objectives[1];
        WsStatus::Ok
    })
}

/// Baseline objectives `[Φ_REFL, Φ_RAD]` the archive was normalized with.
///
/// # Safety
/// `out` must point to two writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ws_archive_std_objectives(
    archive: *const WsArchive,
    out: *mut f64,
) -> WsStatus {
    guard(|| {
        let Some(archive) = archive.as_ref() else {
            return fail(WsStatus::NullPointer, "null archive");
        };
        if out.is_null() {
            return fail(WsStatus::NullPointer, "null output pointer");
        }
        let out = std::slice::from_raw_parts_mut(out, 2);
        out[0] = archive.synthesis.std_objectives[0];
        out[1] = archive.synthesis.std_objectives[1];
        WsStatus::Ok
    })
}

/// Excitation weights of member `index`; buffers hold N values.
///
/// # Safety
/// `re`/`im` must point to N writable doubles.
#[no_mangle]
pub unsafe extern "C" fn ws_archive_weights(
    archive: *const WsArchive,
    index: usize,
    re: *mut f64,
    im: *mut f64,
) -> WsStatus {
    guard(|| {
        let Some(archive) = archive.as_ref() else {
            return fail(WsStatus::NullPointer, "null archive");
        };
        if re.is_null() || im.is_null() {
            return fail(WsStatus::NullPointer, "null output buffer");
        }
        if index >= archive.synthesis.archive.len() {
            return fail(WsStatus::InvalidArgument, "archive index out of range");
        }
        let entry = archive.synthesis.archive.entry(index);
        match archive
            .feasibility
            .decode(&entry.decision, archive.synthesis.scan)
        {
            Ok(exc) => {
                let re = std::slice::from_raw_parts_mut(re, exc.len());
                let im = std::slice::from_raw_parts_mut(im, exc.len());
                for (k, w) in exc.weights().iter().enumerate() {
                    re[k] = w.re;
                    im[k] = w.im;
                }
                WsStatus::Ok
            }
            Err(e) => fail(WsStatus::Physics, &e.to_string()),
        }
    })
}

/// Match-std trade-off selection. `out_index` receives the selected member
/// or `usize::MAX` when the baseline fallback applies (`out_fallback` = 1).
///
/// # Safety
/// `out_index` and `out_fallback` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn ws_archive_select_match_std(
    archive: *const WsArchive,
    tolerance: f64,
    out_index: *mut usize,
    out_fallback: *mut i32,
) -> WsStatus {
    guard(|| {
        let Some(archive) = archive.as_ref() else {
            return fail(WsStatus::NullPointer, "null archive");
        };
        if out_index.is_null() || out_fallback.is_null() {
            return fail(WsStatus::NullPointer, "null output pointer");
        }
        match select_tradeoff(
            &archive.synthesis.archive,
            archive.synthesis.std_objectives,
            SelectionCriterion::MatchStd,
            tolerance,
        ) {
            Ok(Selected::Member(i)) => {
                *out_index = i;
                *out_fallback = 0;
                WsStatus::Ok
            }
            Ok(Selected::StdFallback) => {
                *out_index = usize::MAX;
                *out_fallback = 1;
                WsStatus::Ok
            }
            Err(e) => fail(WsStatus::Synthesis, &e.to_string()),
        }
    })
}
