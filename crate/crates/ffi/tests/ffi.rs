use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use surrogate_morph_ffi::*;

fn last_error() -> String {
    let p = sm_last_error_message();
    assert!(!p.is_null(), "expected an error message");
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

fn tone(freq: f32, n: usize, sr: u32) -> Vec<f32> {
    (0..n).map(|i| 0.4 * (2.0 * std::f32::consts::PI * freq * i as f32 / sr as f32).sin()).collect()
}

unsafe fn waveform(samples: &[f32], channels: u32, sr: u32) -> *mut SmWaveform {
    let mut w = ptr::null_mut();
    let frames = samples.len() / channels as usize;
    assert_eq!(sm_waveform_new(samples.as_ptr(), frames, channels, sr, &mut w), SmStatus::Ok);
    w
}

#[test]
fn waveform_round_trip_through_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("a.wav").to_str().unwrap()).unwrap();
    // interleaved stereo: left tone, right silence
    let left = tone(440.0, 1000, 16_000);
    let inter: Vec<f32> = left.iter().flat_map(|&l| [l, 0.0]).collect();
    unsafe {
        let w = waveform(&inter, 2, 16_000);
        assert_eq!(sm_waveform_save(w, path.as_ptr(), SmBitDepth::Float32 as u32), SmStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(sm_waveform_load(path.as_ptr(), &mut back), SmStatus::Ok);
        let (mut frames, mut ch, mut sr) = (0usize, 0u32, 0u32);
        assert_eq!(sm_waveform_info(back, &mut frames, &mut ch, &mut sr), SmStatus::Ok);
        assert_eq!((frames, ch, sr), (1000, 2, 16_000));
        let mut buf = vec![0.0f32; 2000];
        assert_eq!(sm_waveform_read(back, buf.as_mut_ptr(), buf.len()), SmStatus::Ok);
        assert_eq!(buf, inter);
        assert_eq!(sm_waveform_read(back, buf.as_mut_ptr(), 1999), SmStatus::InvalidArgument);
        sm_waveform_free(w);
        sm_waveform_free(back);
    }
}

#[test]
fn load_errors_carry_status_and_message() {
    let dir = tempfile::tempdir().unwrap();
    let missing = CString::new(dir.path().join("nope.wav").to_str().unwrap()).unwrap();
    let junk_path = dir.path().join("junk.wav");
    std::fs::write(&junk_path, b"definitely not audio").unwrap();
    let junk = CString::new(junk_path.to_str().unwrap()).unwrap();
    let mut w = ptr::null_mut();
    unsafe {
        assert_eq!(sm_waveform_load(missing.as_ptr(), &mut w), SmStatus::Io);
        assert!(last_error().contains("nope.wav"));
        assert_eq!(sm_waveform_load(junk.as_ptr(), &mut w), SmStatus::AudioFormat);
        assert_eq!(sm_waveform_load(ptr::null(), &mut w), SmStatus::NullPointer);
    }
    assert!(w.is_null());
    // a successful call clears the message
    assert_eq!(sm_correspondence(0.5, 0.5), 0.5);
    let mut out = 0.0;
    assert_eq!(unsafe { sm_intermediateness(0.8, 0.4, &mut out) }, SmStatus::Ok);
    assert!(sm_last_error_message().is_null());
}

#[test]
fn augment_matches_library() {
    let sr = 16_000;
    let p = tone(220.0, 8000, sr);
    let s = tone(1234.0, 3000, sr);
    let expected = surrogate_morph::dsp::augment_pair(
        &surrogate_morph::audio_io::Waveform::mono(p.clone(), sr).unwrap(),
        &surrogate_morph::audio_io::Waveform::mono(s.clone(), sr).unwrap(),
        surrogate_morph::dsp::AugmentationMode::Both,
        &Default::default(),
    )
    .unwrap();
    unsafe {
        let (pw, sw) = (waveform(&p, 1, sr), waveform(&s, 1, sr));
        let mut out = ptr::null_mut();
        assert_eq!(sm_augment_pair(pw, sw, SmMode::Both as u32, ptr::null(), &mut out), SmStatus::Ok);
        let mut buf = vec![0.0f32; 8000];
        assert_eq!(sm_waveform_read(out, buf.as_mut_ptr(), buf.len()), SmStatus::Ok);
        assert_eq!(buf, expected.channel(0));
        sm_waveform_free(out);

        let mut params = sm_augment_params_default();
        params.eq_smooth_window = 4;
        let mut out2 = ptr::null_mut();
        assert_eq!(sm_augment_pair(pw, sw, SmMode::Both as u32, &params, &mut out2), SmStatus::InvalidArgument);
        assert!(out2.is_null());
        assert_eq!(sm_augment_pair(pw, sw, 9, ptr::null(), &mut out2), SmStatus::InvalidArgument);
        assert!(last_error().contains("mode"));

        let other = waveform(&s, 1, 22_050);
        assert_eq!(sm_augment_pair(pw, other, 0, ptr::null(), &mut out2), SmStatus::Dsp);
        sm_waveform_free(pw);
        sm_waveform_free(sw);
        sm_waveform_free(other);
    }
}

#[test]
fn captions() {
    let x = CString::new("dog bark").unwrap();
    let y = CString::new("glass").unwrap();
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(sm_caption(SmMode::RmsOnly as u32, x.as_ptr(), y.as_ptr(), &mut out), SmStatus::Ok);
        assert_eq!(CStr::from_ptr(out).to_str().unwrap(), "The behavior of dog bark with textures from dog bark and glass");
        sm_string_free(out);
        let empty = CString::new("").unwrap();
        assert_eq!(sm_caption(SmMode::None as u32, empty.as_ptr(), y.as_ptr(), &mut out), SmStatus::InvalidArgument);
    }
}

#[test]
fn metrics() {
    let mut v = 0.0;
    unsafe {
        assert_eq!(sm_intermediateness(0.8, 0.4, &mut v), SmStatus::Ok);
        assert!((v - 0.5).abs() < 1e-12);
        assert_eq!(sm_directionality(0.30, 0.25, 0.05, &mut v), SmStatus::Ok);
        assert!((v - 0.46212).abs() < 1e-5);
        assert_eq!(sm_directionality(0.3, 0.2, 0.0, &mut v), SmStatus::Metric);

        let (a, b) = ([1.0, 0.0, 1.0], [1.0, 1.0, 0.0]);
        assert_eq!(sm_cosine_similarity(a.as_ptr(), b.as_ptr(), 3, &mut v), SmStatus::Ok);
        assert!((v - 0.5).abs() < 1e-12);
        let zero = [0.0; 3];
        assert_eq!(sm_cosine_similarity(a.as_ptr(), zero.as_ptr(), 3, &mut v), SmStatus::Metric);

        // rank-2 latents
        let rows: Vec<f64> = (0..40).flat_map(|t| {
            let (u, w) = ((t as f64).sin(), (t as f64 * 0.7).cos());
            [u, w, u + w, u - 2.0 * w]
        }).collect();
        assert_eq!(sm_lcs(rows.as_ptr(), 40, 4, &mut v), SmStatus::Ok);
        assert!((v - 1.0).abs() < 1e-9);

        let (x, y) = ([1.0, 2.0, 2.0, 3.0], [1.0, 3.0, 2.0, 4.0]);
        assert_eq!(sm_spearman(x.as_ptr(), y.as_ptr(), 4, &mut v), SmStatus::Ok);
        assert!((v - 0.9f64.sqrt()).abs() < 1e-12);
        let labels = [0u8, 1, 0, 1];
        assert_eq!(sm_roc_auc([0.2, 0.5, 0.5, 0.9].as_ptr(), labels.as_ptr(), 4, &mut v), SmStatus::Ok);
        assert!((v - 0.875).abs() < 1e-12);
        assert_eq!(sm_spearman(ptr::null(), y.as_ptr(), 4, &mut v), SmStatus::NullPointer);
        assert_eq!(sm_spearman(x.as_ptr(), y.as_ptr(), 4, ptr::null_mut()), SmStatus::NullPointer);
    }
}

#[test]
fn frechet_between_handles() {
    // 1-D samples with means 0 and 1
    let a = [-1.0, 1.0, -1.0, 1.0];
    let b = [-1.0, 3.0, -1.0, 3.0];
    unsafe {
        let (mut sa, mut sb) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(sm_gaussian_stats_from_rows(a.as_ptr(), 4, 1, &mut sa), SmStatus::Ok);
        assert_eq!(sm_gaussian_stats_from_rows(b.as_ptr(), 4, 1, &mut sb), SmStatus::Ok);
        let mut dim = 0;
        assert_eq!(sm_gaussian_stats_dim(sa, &mut dim), SmStatus::Ok);
        assert_eq!(dim, 1);
        let (mut ab, mut aa) = (0.0, 1.0);
        assert_eq!(sm_frechet_distance(sa, sb, &mut ab), SmStatus::Ok);
        assert_eq!(sm_frechet_distance(sa, sa, &mut aa), SmStatus::Ok);
        let var = |x: &[f64]| {
            let m = x.iter().sum::<f64>() / x.len() as f64;
            x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64
        };
        let oracle = 1.0 + (var(&a).sqrt() - var(&b).sqrt()).powi(2);
        assert!((ab - oracle).abs() < 1e-9, "{ab} vs {oracle}");
        assert!(aa.abs() < 1e-9);
        let mut bad = ptr::null_mut();
        assert_eq!(sm_gaussian_stats_from_rows(a.as_ptr(), 1, 1, &mut bad), SmStatus::Metric);
        assert_eq!(sm_gaussian_stats_from_rows(a.as_ptr(), 4, 0, &mut bad), SmStatus::InvalidArgument);
        assert!(bad.is_null());
        sm_gaussian_stats_free(sa);
        sm_gaussian_stats_free(sb);
        sm_gaussian_stats_free(ptr::null_mut());
    }
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/surrogate_morph.h");
    assert!(header.exists(), "header not generated");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"surrogate_morph.h\"\n\
         int main(void) {\n\
           SmWaveform *w = NULL;\n\
           SmAugmentParams p = sm_augment_params_default();\n\
           (void)p;\n\
           return sm_waveform_load(\"x.wav\", &w) == SM_STATUS_OK ? 0 : SM_MODE_BOTH;\n\
         }\n",
    )
    .unwrap();
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(header.parent().unwrap())
        .arg(&src)
        .status()
        .expect("a C compiler (cc) is needed for this test");
    assert!(status.success());
}
