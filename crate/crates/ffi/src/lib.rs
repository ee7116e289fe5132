//! C ABI over `surrogate-morph`.
//!
//! Every fallible function returns an [`SmStatus`] and writes its result
//! through an out-pointer. On failure a message is kept per thread and can be
//! fetched with [`sm_last_error_message`]. Panics are caught at the boundary
//! and reported as [`SmStatus::Panic`].
//!
//! Handles ([`SmWaveform`], [`SmGaussianStats`]) are opaque and owned by the
//! caller once returned; release them with the matching `_free` function.
//! Strings returned by the library are released with [`sm_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{self, AssertUnwindSafe};
use std::{ptr, slice};

use surrogate_morph::audio_io::{load_wav, save_wav, AudioError, BitDepth, Waveform};
use surrogate_morph::dataset::{caption_for, DatasetError};
use surrogate_morph::dsp::{augment_pair, AugmentParams, AugmentationMode, DspError};
use surrogate_morph::metrics::{
    correspondence, cosine_sim, directionality, frechet_distance, intermediateness, lcs, roc_auc, spearman_rho,
    DirectionalityParams, Embedding, GaussianStats, LatentMatrix, MetricError,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    AudioFormat = 4,
    Dsp = 5,
    Metric = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmMode {
    RmsOnly = 0,
    SpectralOnly = 1,
    Both = 2,
    None = 3,
}

// Enum-typed parameters would be undefined behaviour for out-of-range values
// coming from C, so modes and bit depths cross the boundary as u32.
fn mode_from(m: u32) -> FfiResult<AugmentationMode> {
    AugmentationMode::ALL
        .get(m as usize)
        .copied()
        .ok_or_else(|| Failure(SmStatus::InvalidArgument, format!("unknown mode {m}")))
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmBitDepth {
    Pcm16 = 0,
    Pcm24 = 1,
    Float32 = 2,
}

fn depth_from(b: u32) -> FfiResult<BitDepth> {
    match b {
        0 => Ok(BitDepth::Pcm16),
        1 => Ok(BitDepth::Pcm24),
        2 => Ok(BitDepth::Float32),
        _ => Err(Failure(SmStatus::InvalidArgument, format!("unknown bit depth {b}"))),
    }
}

/// Augmentation tunables. Start from [`sm_augment_params_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SmAugmentParams {
    pub rms_frame_size: usize,
    pub rms_hop: usize,
    pub eq_smooth_window: usize,
    pub epsilon: f64,
    pub output_peak: f32,
}

impl From<SmAugmentParams> for AugmentParams {
    fn from(p: SmAugmentParams) -> Self {
        AugmentParams {
            rms_frame_size: p.rms_frame_size,
            rms_hop: p.rms_hop,
            eq_smooth_window: p.eq_smooth_window,
            epsilon: p.epsilon,
            output_peak: p.output_peak,
        }
    }
}

/// Decoded audio.
pub struct SmWaveform {
    inner: Waveform,
}

/// Mean and covariance of a set of embeddings.
pub struct SmGaussianStats {
    inner: GaussianStats,
}

struct Failure(SmStatus, String);

type FfiResult<T> = Result<T, Failure>;

impl From<AudioError> for Failure {
    fn from(e: AudioError) -> Self {
        let status = match e {
            AudioError::Io { .. } => SmStatus::Io,
            AudioError::InvalidWaveform(_) => SmStatus::InvalidArgument,
            _ => SmStatus::AudioFormat,
        };
        Failure(status, e.to_string())
    }
}

impl From<DspError> for Failure {
    fn from(e: DspError) -> Self {
        match e {
            DspError::InvalidParams(_) => Failure(SmStatus::InvalidArgument, e.to_string()),
            DspError::Audio(a) => a.into(),
            _ => Failure(SmStatus::Dsp, e.to_string()),
        }
    }
}

impl From<MetricError> for Failure {
    fn from(e: MetricError) -> Self {
        Failure(SmStatus::Metric, e.to_string())
    }
}

impl From<DatasetError> for Failure {
    fn from(e: DatasetError) -> Self {
        Failure(SmStatus::InvalidArgument, e.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard<F: FnOnce() -> FfiResult<()>>(f: F) -> SmStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match panic::catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SmStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            SmStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(SmStatus::NullPointer, format!("{what} is null"))
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> FfiResult<()> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn as_str<'a>(s: *const c_char, what: &str) -> FfiResult<&'a str> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure(SmStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

unsafe fn as_slice<'a, T>(p: *const T, len: usize, what: &str) -> FfiResult<&'a [T]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

fn rows_of(data: &[f64], rows: usize, cols: usize) -> FfiResult<Vec<&[f64]>> {
    if cols == 0 || rows.checked_mul(cols) != Some(data.len()) {
        return Err(Failure(SmStatus::InvalidArgument, format!("{rows}x{cols} does not match {} values", data.len())));
    }
    Ok(data.chunks_exact(cols).collect())
}

/// Message for the most recent failure on this thread, or NULL if the last
/// call succeeded. The pointer stays valid until the next call into this
/// library on the same thread.
#[no_mangle]
pub extern "C" fn sm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Build a waveform from interleaved samples (`frames * channels` values).
///
/// # Safety
/// `samples` must point to `frames * channels` readable floats.
#[no_mangle]
pub unsafe extern "C" fn sm_waveform_new(
    samples: *const f32,
    frames: usize,
    channels: u32,
    sample_rate: u32,
    out: *mut *mut SmWaveform,
) -> SmStatus {
    guard(|| {
        let ch = channels as usize;
        let total = frames
            .checked_mul(ch)
            .ok_or_else(|| Failure(SmStatus::InvalidArgument, "frames * channels overflows".into()))?;
        let data = as_slice(samples, total, "samples")?;
        let mut planar = vec![Vec::with_capacity(frames); ch];
        for frame in data.chunks_exact(ch.max(1)) {
            for (c, &s) in planar.iter_mut().zip(frame) {
                c.push(s);
            }
        }
        let w = Waveform::new(planar, sample_rate)?;
        write_out(out, Box::into_raw(Box::new(SmWaveform { inner: w })))
    })
}

/// # Safety
/// `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sm_waveform_load(path: *const c_char, out: *mut *mut SmWaveform) -> SmStatus {
    guard(|| {
        let w = load_wav(as_str(path, "path")?)?;
        write_out(out, Box::into_raw(Box::new(SmWaveform { inner: w })))
    })
}

/// `depth` is an [`SmBitDepth`] value.
///
/// # Safety
/// `w` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sm_waveform_save(w: *const SmWaveform, path: *const c_char, depth: u32) -> SmStatus {
    guard(|| {
        let w = as_ref(w, "waveform")?;
        save_wav(&w.inner, as_str(path, "path")?, depth_from(depth)?)?;
        Ok(())
    })
}

/// # Safety
/// `w` must be a live handle; each out-pointer may be NULL.
#[no_mangle]
pub unsafe extern "C" fn sm_waveform_info(
    w: *const SmWaveform,
    frames: *mut usize,
    channels: *mut u32,
    sample_rate: *mut u32,
) -> SmStatus {
    guard(|| {
        let w = &as_ref(w, "waveform")?.inner;
        if !frames.is_null() {
            frames.write(w.len());
        }
        if !channels.is_null() {
            channels.write(w.num_channels() as u32);
        }
        if !sample_rate.is_null() {
            sample_rate.write(w.sample_rate());
        }
        Ok(())
    })
}

/// Copy interleaved samples into `dst`, which holds `capacity` floats and
/// must fit `frames * channels`.
///
/// # Safety
/// `w` must be a live handle and `dst` writable for `capacity` floats.
#[no_mangle]
pub unsafe extern "C" fn sm_waveform_read(w: *const SmWaveform, dst: *mut f32, capacity: usize) -> SmStatus {
    guard(|| {
        let w = &as_ref(w, "waveform")?.inner;
        let needed = w.len() * w.num_channels();
        if capacity < needed {
            return Err(Failure(SmStatus::InvalidArgument, format!("buffer holds {capacity} samples, need {needed}")));
        }
        if dst.is_null() {
            return Err(null("dst"));
        }
        let dst = slice::from_raw_parts_mut(dst, needed);
        let nch = w.num_channels();
        for (c, ch) in w.channels().iter().enumerate() {
            for (i, &s) in ch.iter().enumerate() {
                dst[i * nch + c] = s;
            }
        }
        Ok(())
    })
}

/// # Safety
/// `w` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sm_waveform_free(w: *mut SmWaveform) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

#[no_mangle]
pub extern "C" fn sm_augment_params_default() -> SmAugmentParams {
    let d = AugmentParams::default();
    SmAugmentParams {
        rms_frame_size: d.rms_frame_size,
        rms_hop: d.rms_hop,
        eq_smooth_window: d.eq_smooth_window,
        epsilon: d.epsilon,
        output_peak: d.output_peak,
    }
}

/// Build one surrogate morph. `mode` is an [`SmMode`] value; `params` may be
/// NULL for the defaults.
///
/// # Safety
/// `primary` and `secondary` must be live handles; `params` NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn sm_augment_pair(
    primary: *const SmWaveform,
    secondary: *const SmWaveform,
    mode: u32,
    params: *const SmAugmentParams,
    out: *mut *mut SmWaveform,
) -> SmStatus {
    guard(|| {
        let p = as_ref(primary, "primary")?;
        let s = as_ref(secondary, "secondary")?;
        let params = params.as_ref().map_or_else(AugmentParams::default, |p| (*p).into());
        let w = augment_pair(&p.inner, &s.inner, mode_from(mode)?, &params)?;
        write_out(out, Box::into_raw(Box::new(SmWaveform { inner: w })))
    })
}

/// Caption for an [`SmMode`] value; free the result with [`sm_string_free`].
///
/// # Safety
/// `x` and `y` must be NUL-terminated UTF-8 strings.
#[no_mangle]
pub unsafe extern "C" fn sm_caption(mode: u32, x: *const c_char, y: *const c_char, out: *mut *mut c_char) -> SmStatus {
    guard(|| {
        let caption = caption_for(mode_from(mode)?, as_str(x, "x")?, as_str(y, "y")?)?;
        let c = CString::new(caption).map_err(|e| Failure(SmStatus::InvalidArgument, e.to_string()))?;
        write_out(out, c.into_raw())
    })
}

/// # Safety
/// `a` and `b` must each point to `dim` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn sm_cosine_similarity(a: *const f64, b: *const f64, dim: usize, out: *mut f64) -> SmStatus {
    guard(|| {
        let a = Embedding::new("a", as_slice(a, dim, "a")?.to_vec())?;
        let b = Embedding::new("b", as_slice(b, dim, "b")?.to_vec())?;
        write_out(out, cosine_sim(&a, &b)?)
    })
}

#[no_mangle]
pub extern "C" fn sm_correspondence(sim_x: f64, sim_y: f64) -> f64 {
    correspondence(sim_x, sim_y)
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_intermediateness(sim_x: f64, sim_y: f64, out: *mut f64) -> SmStatus {
    guard(|| write_out(out, intermediateness(sim_x, sim_y)?))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sm_directionality(s_int: f64, s_rev: f64, temperature: f64, out: *mut f64) -> SmStatus {
    guard(|| write_out(out, directionality(s_int, s_rev, &DirectionalityParams { temperature })?))
}

/// LCS of a row-major `rows x cols` latent matrix.
///
/// # Safety
/// `data` must point to `rows * cols` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn sm_lcs(data: *const f64, rows: usize, cols: usize, out: *mut f64) -> SmStatus {
    guard(|| {
        let n = rows.checked_mul(cols).ok_or_else(|| Failure(SmStatus::InvalidArgument, "size overflows".into()))?;
        let m = LatentMatrix::new("ffi", rows, cols, as_slice(data, n, "data")?.to_vec())?;
        write_out(out, lcs(&m)?)
    })
}

/// Mean and covariance of `rows` row-major embeddings of width `cols`.
///
/// # Safety
/// `data` must point to `rows * cols` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn sm_gaussian_stats_from_rows(
    data: *const f64,
    rows: usize,
    cols: usize,
    out: *mut *mut SmGaussianStats,
) -> SmStatus {
    guard(|| {
        let n = rows.checked_mul(cols).ok_or_else(|| Failure(SmStatus::InvalidArgument, "size overflows".into()))?;
        let data = as_slice(data, n, "data")?;
        let stats = GaussianStats::from_rows(rows_of(data, rows, cols)?)?;
        write_out(out, Box::into_raw(Box::new(SmGaussianStats { inner: stats })))
    })
}

/// # Safety
/// `s` must be a live handle; `dim` writable.
#[no_mangle]
pub unsafe extern "C" fn sm_gaussian_stats_dim(s: *const SmGaussianStats, dim: *mut usize) -> SmStatus {
    guard(|| write_out(dim, as_ref(s, "stats")?.inner.dim()))
}

/// # Safety
/// `s` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sm_gaussian_stats_free(s: *mut SmGaussianStats) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `a` and `b` must be live handles.
#[no_mangle]
pub unsafe extern "C" fn sm_frechet_distance(
    a: *const SmGaussianStats,
    b: *const SmGaussianStats,
    out: *mut f64,
) -> SmStatus {
    guard(|| write_out(out, frechet_distance(&as_ref(a, "a")?.inner, &as_ref(b, "b")?.inner)?))
}

/// # Safety
/// `x` and `y` must each point to `n` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn sm_spearman(x: *const f64, y: *const f64, n: usize, out: *mut f64) -> SmStatus {
    guard(|| write_out(out, spearman_rho(as_slice(x, n, "x")?, as_slice(y, n, "y")?)?))
}

/// ROC AUC; `labels` holds 0 for negatives and anything else for positives.
///
/// # Safety
/// `scores` and `labels` must each point to `n` readable values.
#[no_mangle]
pub unsafe extern "C" fn sm_roc_auc(scores: *const f64, labels: *const u8, n: usize, out: *mut f64) -> SmStatus {
    guard(|| {
        let labels: Vec<bool> = as_slice(labels, n, "labels")?.iter().map(|&l| l != 0).collect();
        write_out(out, roc_auc(as_slice(scores, n, "scores")?, &labels)?)
    })
}
