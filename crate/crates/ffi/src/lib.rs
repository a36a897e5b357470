//! C interface to the split-state codecs.
//!
//! Objects are opaque handles created by `*_new`/`*_load` and released by
//! the matching `*_free`. Every call returns an [`NmcStatus`]; on failure a
//! description is available from [`nmc_last_error`] on the same thread.
//! Bit strings cross the boundary as integers whose most significant used
//! bit is the first bit of the string.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nmcodex::codecs::{Nmc2a, Nmc3c, Nmre, SplitCodec};
use nmcodex::nmext::{NmExtractor, ParameterProfile, Pipeline, Registry};
use nmcodex::Error;

/// Result of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NmcStatus {
    Ok = 0,
    NullPointer = 1,
    UnknownProfile = 2,
    MalformedInput = 3,
    Incompatible = 4,
    InvalidArgument = 5,
    Internal = 6,
}

/// Classical codes reachable through [`nmc_codec_new`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NmcScheme {
    ThreeSplit = 0,
    TwoSplit = 1,
}

/// Sizes of a registered profile, in bits.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct NmcProfileInfo {
    pub n: u32,
    pub y_len: u32,
    pub out_len: u32,
    pub randomness_len: u32,
}

/// Sizes of a codec, in bits. Unused entries of `split_lens` are zero.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct NmcCodecInfo {
    pub message_len: u32,
    pub randomness_len: u32,
    pub splits: u32,
    pub split_lens: [u32; 3],
}

/// Output of the randomness encoder.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct NmcNmreOutput {
    pub message: u64,
    pub x: u64,
    pub y: u64,
}

/// A registered profile bound to its extractor.
pub struct NmcProfile {
    nmre: Nmre,
}

/// A classical split-state code.
pub struct NmcCodec {
    inner: Box<dyn SplitCodec + Send>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> NmcStatus {
    match e {
        Error::UnknownProfile(_) => NmcStatus::UnknownProfile,
        Error::MalformedHex(_) | Error::Parse(_) | Error::LengthMismatch { .. } => NmcStatus::MalformedInput,
        Error::Incompatible { .. } => NmcStatus::Incompatible,
        _ => NmcStatus::InvalidArgument,
    }
}

/// Runs `f`, recording the error text and turning panics into `Internal`.
fn guard(f: impl FnOnce() -> Result<(), (NmcStatus, String)>) -> NmcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NmcStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            NmcStatus::Internal
        }
    }
}

fn lib_err(e: Error) -> (NmcStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (NmcStatus, String) {
    (NmcStatus::NullPointer, format!("{what} is null"))
}

fn fits(v: u64, bits: usize, what: &str) -> Result<(), (NmcStatus, String)> {
    if bits < 64 && v >> bits != 0 {
        return Err((NmcStatus::MalformedInput, format!("{what} {v:#x} does not fit in {bits} bits")));
    }
    Ok(())
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, (NmcStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (NmcStatus, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Text of the last error on this thread, or null. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn nmc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Loads a profile by name from the built-in registry, or from
/// `$NMCODEX_PROFILE_DIR` when set.
///
/// # Safety
/// `name` must be a valid NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nmc_profile_load(name: *const c_char, out_profile: *mut *mut NmcProfile) -> NmcStatus {
    guard(|| {
        let slot = out(out_profile, "out_profile")?;
        *slot = ptr::null_mut();
        if name.is_null() {
            return Err(null("name"));
        }
        let name = CStr::from_ptr(name).to_str().map_err(|_| (NmcStatus::MalformedInput, "name is not UTF-8".into()))?;
        let p = Registry::from_env().and_then(|r| r.get(name)).map_err(lib_err)?;
        *slot = Box::into_raw(Box::new(NmcProfile { nmre: Nmre::new(p, Pipeline::Full) }));
        Ok(())
    })
}

/// # Safety
/// `profile` must come from [`nmc_profile_load`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn nmc_profile_free(profile: *mut NmcProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

fn profile_of(p: &NmcProfile) -> &ParameterProfile {
    p.nmre.profile()
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nmc_profile_info(profile: *const NmcProfile, info: *mut NmcProfileInfo) -> NmcStatus {
    guard(|| {
        let p = profile_of(deref(profile, "profile")?);
        *out(info, "info")? = NmcProfileInfo {
            n: p.n() as u32,
            y_len: p.y_len() as u32,
            out_len: p.out_len() as u32,
            randomness_len: p.randomness_len() as u32,
        };
        Ok(())
    })
}

fn extractor(p: &NmcProfile) -> &NmExtractor {
    p.nmre.extractor()
}

/// Extractor output on sources `x` (`n` bits) and `y` (`y_len` bits).
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nmc_nmext_eval(profile: *const NmcProfile, x: u64, y: u64, result: *mut u64) -> NmcStatus {
    guard(|| {
        let h = deref(profile, "profile")?;
        let p = profile_of(h);
        fits(x, p.n(), "x")?;
        fits(y, p.y_len(), "y")?;
        *out(result, "result")? = extractor(h).eval_index((x << p.y_len()) | y);
        Ok(())
    })
}

/// Splits `randomness` (`n + y_len` bits) into the two sources and the
/// message they decode to.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nmc_nmre_encode(profile: *const NmcProfile, randomness: u64, result: *mut NmcNmreOutput) -> NmcStatus {
    guard(|| {
        let h = deref(profile, "profile")?;
        let p = profile_of(h);
        fits(randomness, p.randomness_len(), "randomness")?;
        let yl = p.y_len();
        let (x, y) = (randomness >> yl, randomness & ((1 << yl) - 1));
        *out(result, "result")? = NmcNmreOutput { message: h.nmre.decode_int(x, y), x, y };
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nmc_nmre_decode(profile: *const NmcProfile, x: u64, y: u64, message: *mut u64) -> NmcStatus {
    nmc_nmext_eval(profile, x, y, message)
}

/// Builds a classical code over the profile.
///
/// # Safety
/// `profile` must be valid and `out_codec` writable.
#[no_mangle]
pub unsafe extern "C" fn nmc_codec_new(profile: *const NmcProfile, scheme: NmcScheme, out_codec: *mut *mut NmcCodec) -> NmcStatus {
    guard(|| {
        let slot = out(out_codec, "out_codec")?;
        *slot = ptr::null_mut();
        let p = profile_of(deref(profile, "profile")?).clone();
        let inner: Box<dyn SplitCodec + Send> = match scheme {
            NmcScheme::ThreeSplit => Box::new(Nmc3c::new(p, Pipeline::Full).map_err(lib_err)?),
            NmcScheme::TwoSplit => Box::new(Nmc2a::new(p, Pipeline::Full).map_err(lib_err)?),
        };
        *slot = Box::into_raw(Box::new(NmcCodec { inner }));
        Ok(())
    })
}

/// # Safety
/// `codec` must come from [`nmc_codec_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn nmc_codec_free(codec: *mut NmcCodec) {
    if !codec.is_null() {
        drop(Box::from_raw(codec));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn nmc_codec_info(codec: *const NmcCodec, info: *mut NmcCodecInfo) -> NmcStatus {
    guard(|| {
        let c = &deref(codec, "codec")?.inner;
        let lens = c.split_lens();
        let mut split_lens = [0u32; 3];
        for (slot, l) in split_lens.iter_mut().zip(&lens) {
            *slot = *l as u32;
        }
        *out(info, "info")? = NmcCodecInfo {
            message_len: c.message_len() as u32,
            randomness_len: c.randomness_len() as u32,
            splits: lens.len() as u32,
            split_lens,
        };
        Ok(())
    })
}

/// Encodes `message` with `randomness`, writing one integer per split into
/// `parts`, which must hold `parts_len >= splits` entries.
///
/// # Safety
/// `parts` must point to `parts_len` writable integers.
#[no_mangle]
pub unsafe extern "C" fn nmc_codec_encode(
    codec: *const NmcCodec,
    message: u64,
    randomness: u64,
    parts: *mut u64,
    parts_len: usize,
) -> NmcStatus {
    guard(|| {
        let c = &deref(codec, "codec")?.inner;
        fits(message, c.message_len(), "message")?;
        fits(randomness, c.randomness_len(), "randomness")?;
        let words = c.encode_split(message, randomness);
        if parts.is_null() {
            return Err(null("parts"));
        }
        if parts_len < words.len() {
            return Err((NmcStatus::InvalidArgument, format!("parts holds {parts_len}, need {}", words.len())));
        }
        std::slice::from_raw_parts_mut(parts, words.len()).copy_from_slice(&words);
        Ok(())
    })
}

/// Decodes `parts`. `accepted` is set to 0 when the decoder outputs the
/// rejection symbol, in which case `message` is left untouched.
///
/// # Safety
/// `parts` must point to `parts_len` readable integers; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn nmc_codec_decode(
    codec: *const NmcCodec,
    parts: *const u64,
    parts_len: usize,
    message: *mut u64,
    accepted: *mut u8,
) -> NmcStatus {
    guard(|| {
        let c = &deref(codec, "codec")?.inner;
        let lens = c.split_lens();
        if parts.is_null() {
            return Err(null("parts"));
        }
        if parts_len != lens.len() {
            return Err((NmcStatus::InvalidArgument, format!("expected {} parts, got {parts_len}", lens.len())));
        }
        let words = std::slice::from_raw_parts(parts, parts_len);
        for (i, (&w, &l)) in words.iter().zip(&lens).enumerate() {
            fits(w, l, &format!("part {i}"))?;
        }
        let (m_out, ok_out) = (out(message, "message")?, out(accepted, "accepted")?);
        match c.decode_split(words) {
            Some(m) => {
                *m_out = m;
                *ok_out = 1;
            }
            None => *ok_out = 0,
        }
        Ok(())
    })
}
