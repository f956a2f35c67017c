//! C interface to `nilmix`.
//!
//! Every fallible call returns a [`NilmixStatus`]; on failure the message is
//! kept per thread and can be read with [`nilmix_last_error`]. Groups and
//! walks are opaque handles released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use nilmix::geometry::{bfs_distances, GeneratorSet};
use nilmix::group::{Element, GroupSpec, GroupTable, DEFAULT_CAP};
use nilmix::mixing::{mixing_time, point_mass, tv_at, WalkSpace};
use nilmix::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NilmixStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    CapExceeded = 3,
    NotGenerating = 4,
    BufferTooSmall = 5,
    Internal = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NilmixFamily {
    Unitriangular = 0,
    Heisenberg = 1,
}

/// An enumerated group.
pub struct NilmixGroup {
    table: GroupTable,
}

/// A continuous-time walk on a group, with its step multiset.
pub struct NilmixWalk {
    space: WalkSpace,
    members: Vec<u32>,
    diameter: Option<u32>,
}

thread_local! {
    static LAST_ERROR: RefCell<Vec<u8>> = const { RefCell::new(Vec::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| {
        let mut v = msg.into_bytes();
        v.retain(|&b| b != 0);
        v.push(0);
        *e.borrow_mut() = v;
    });
}

fn status_of(err: &Error) -> NilmixStatus {
    match err {
        Error::CapExceeded { .. } | Error::OrderExceedsCap { .. } => NilmixStatus::CapExceeded,
        Error::NotGenerating | Error::RankSamplingFailed { .. } | Error::Unreachable => {
            NilmixStatus::NotGenerating
        }
        e if e.is_validation() => NilmixStatus::InvalidArgument,
        _ => NilmixStatus::Internal,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (NilmixStatus, String)>) -> NilmixStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NilmixStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("panic inside nilmix".into());
            NilmixStatus::Panic
        }
    }
}

fn lift<T>(r: nilmix::Result<T>) -> Result<T, (NilmixStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (NilmixStatus, String) {
    (NilmixStatus::NullPointer, format!("{what} is null"))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (NilmixStatus, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], (NilmixStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn finish_group(spec: GroupSpec, cap: usize, out: &mut *mut NilmixGroup) -> Result<(), (NilmixStatus, String)> {
    let cap = if cap == 0 { DEFAULT_CAP } else { cap };
    let table = lift(GroupTable::build(&spec, cap))?;
    *out = Box::into_raw(Box::new(NilmixGroup { table }));
    Ok(())
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length including the NUL,
/// or 0 if there is none.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn nilmix_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        if !buf.is_null() && len > 0 && !e.is_empty() {
            let n = (e.len() - 1).min(len - 1);
            std::ptr::copy_nonoverlapping(e.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        e.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nilmix_version() -> *const c_char {
    static V: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(s) => s,
        Err(_) => panic!("version"),
    };
    V.as_ptr()
}

/// Builds `U(m, d)` or `H(m, d)`. `cap` bounds `|G|`; 0 uses the default.
///
/// # Safety
/// `out` must point to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn nilmix_group_new(
    family: NilmixFamily,
    m: u32,
    d: u32,
    cap: usize,
    out: *mut *mut NilmixGroup,
) -> NilmixStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let spec = match family {
            NilmixFamily::Unitriangular => GroupSpec::unitriangular(m, d),
            NilmixFamily::Heisenberg => GroupSpec::heisenberg(m, d),
        };
        finish_group(spec, cap, out)
    })
}

/// Builds `Z_{n_1} x ... x Z_{n_len}`.
///
/// # Safety
/// `moduli` must point to `len` readable values; `out` as for
/// [`nilmix_group_new`].
#[no_mangle]
pub unsafe extern "C" fn nilmix_group_new_abelian(
    moduli: *const u32,
    len: usize,
    cap: usize,
    out: *mut *mut NilmixGroup,
) -> NilmixStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let moduli = slice(moduli, len, "moduli")?;
        finish_group(GroupSpec::abelian(moduli.to_vec()), cap, out)
    })
}

/// # Safety
/// `g` must be null or a handle from `nilmix_group_new*` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nilmix_group_free(g: *mut NilmixGroup) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// `|G|`, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live group handle.
#[no_mangle]
pub unsafe extern "C" fn nilmix_group_order(g: *const NilmixGroup) -> usize {
    g.as_ref().map_or(0, |g| g.table.order())
}

/// Nilpotency class, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live group handle.
#[no_mangle]
pub unsafe extern "C" fn nilmix_group_step(g: *const NilmixGroup) -> usize {
    g.as_ref().map_or(0, |g| g.table.step())
}

/// `|G_ab|`, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live group handle.
#[no_mangle]
pub unsafe extern "C" fn nilmix_group_ab_order(g: *const NilmixGroup) -> usize {
    g.as_ref().map_or(0, |g| g.table.ab_order())
}

/// Writes `|G_1|, ..., |G_{L+1}|` into `buf`. `*written` receives the
/// series length; if it exceeds `len` nothing is copied and
/// `BufferTooSmall` is returned.
///
/// # Safety
/// `g` must be a live group handle, `buf` must point to `len` writable
/// values and `written` to one.
#[no_mangle]
pub unsafe extern "C" fn nilmix_group_series(
    g: *const NilmixGroup,
    buf: *mut usize,
    len: usize,
    written: *mut usize,
) -> NilmixStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(|| null("group"))?;
        let written = out_ref(written, "written")?;
        let sizes = g.table.series_sizes();
        *written = sizes.len();
        if sizes.len() > len {
            return Err((
                NilmixStatus::BufferTooSmall,
                format!("series has {} terms, buffer holds {len}", sizes.len()),
            ));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        std::ptr::copy_nonoverlapping(sizes.as_ptr(), buf, sizes.len());
        Ok(())
    })
}

/// `t_0(k, N)`: the time at which the rate-1 walk on `Z^k` reaches entropy
/// `log N`.
///
/// # Safety
/// `t0` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn nilmix_entropic_time(k: usize, n: f64, t0: *mut f64) -> NilmixStatus {
    guard(|| {
        let t0 = out_ref(t0, "t0")?;
        *t0 = lift(nilmix::entropic::entropic_time(k, n))?.t0;
        Ok(())
    })
}

/// The cutoff time `t_*` for `k` random generators of `g`; `omega <= 0`
/// uses the default.
///
/// # Safety
/// `g` must be a live group handle and `t_star` writable.
#[no_mangle]
pub unsafe extern "C" fn nilmix_cutoff_time(
    g: *const NilmixGroup,
    k: usize,
    omega: f64,
    t_star: *mut f64,
) -> NilmixStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(|| null("group"))?;
        let t_star = out_ref(t_star, "t_star")?;
        let omega = (omega > 0.0).then_some(omega);
        *t_star = lift(nilmix::entropic::cutoff_time(k, &g.table, omega))?.t_star;
        Ok(())
    })
}

fn finish_walk(g: &GroupTable, s: GeneratorSet, out: &mut *mut NilmixWalk) -> Result<(), (NilmixStatus, String)> {
    let space = lift(WalkSpace::group(g, &s))?;
    let diameter = bfs_distances(g, &s).diameter().ok();
    let members = s.members().iter().map(|e| e.index() as u32).collect();
    *out = Box::into_raw(Box::new(NilmixWalk {
        space,
        members,
        diameter,
    }));
    Ok(())
}

/// The walk stepping by `Z_i^{±1}` for the given element indices.
///
/// # Safety
/// `g` must be a live group handle, `members` must point to `k` readable
/// indices and `out` to writable storage.
#[no_mangle]
pub unsafe extern "C" fn nilmix_walk_new(
    g: *const NilmixGroup,
    members: *const u32,
    k: usize,
    out: *mut *mut NilmixWalk,
) -> NilmixStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(|| null("group"))?;
        let out = out_ref(out, "out")?;
        let members = slice(members, k, "members")?;
        if k == 0 {
            return Err((NilmixStatus::InvalidArgument, "k must be positive".into()));
        }
        let n = g.table.order();
        if let Some(&bad) = members.iter().find(|&&z| z as usize >= n) {
            return Err((
                NilmixStatus::InvalidArgument,
                format!("element {bad} out of range for |G| = {n}"),
            ));
        }
        let z: Vec<Element> = members.iter().map(|&z| Element(z)).collect();
        finish_walk(&g.table, GeneratorSet::from_members(&g.table, &z), out)
    })
}

/// The walk for `k` uniform generators, redrawn until they generate.
///
/// # Safety
/// As for [`nilmix_walk_new`].
#[no_mangle]
pub unsafe extern "C" fn nilmix_walk_new_random(
    g: *const NilmixGroup,
    k: usize,
    seed: u64,
    out: *mut *mut NilmixWalk,
) -> NilmixStatus {
    guard(|| {
        let g = g.as_ref().ok_or_else(|| null("group"))?;
        let out = out_ref(out, "out")?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = lift(GeneratorSet::random_generating(&g.table, k, &mut rng, 100_000))?;
        finish_walk(&g.table, s, out)
    })
}

/// # Safety
/// `w` must be null or a live walk handle.
#[no_mangle]
pub unsafe extern "C" fn nilmix_walk_free(w: *mut NilmixWalk) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// Copies the generator indices `Z_1, ..., Z_k` into `buf`, as
/// [`nilmix_group_series`] does for the series.
///
/// # Safety
/// `w` must be a live walk handle, `buf` must point to `len` writable
/// values and `written` to one.
#[no_mangle]
pub unsafe extern "C" fn nilmix_walk_generators(
    w: *const NilmixWalk,
    buf: *mut u32,
    len: usize,
    written: *mut usize,
) -> NilmixStatus {
    guard(|| {
        let w = w.as_ref().ok_or_else(|| null("walk"))?;
        let written = out_ref(written, "written")?;
        *written = w.members.len();
        if w.members.len() > len {
            return Err((NilmixStatus::BufferTooSmall, "buffer too small".into()));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        std::ptr::copy_nonoverlapping(w.members.as_ptr(), buf, w.members.len());
        Ok(())
    })
}

/// Diameter of the Cayley graph; `NotGenerating` if it is disconnected.
///
/// # Safety
/// `w` must be a live walk handle and `diam` writable.
#[no_mangle]
pub unsafe extern "C" fn nilmix_walk_diameter(w: *const NilmixWalk, diam: *mut u32) -> NilmixStatus {
    guard(|| {
        let w = w.as_ref().ok_or_else(|| null("walk"))?;
        let diam = out_ref(diam, "diam")?;
        *diam = w
            .diameter
            .ok_or((NilmixStatus::NotGenerating, "generators do not generate".into()))?;
        Ok(())
    })
}

/// `d(t)`: total variation distance from uniform at time `t`, started at
/// the identity.
///
/// # Safety
/// `w` must be a live walk handle and `d` writable.
#[no_mangle]
pub unsafe extern "C" fn nilmix_walk_tv(w: *const NilmixWalk, t: f64, d: *mut f64) -> NilmixStatus {
    guard(|| {
        let w = w.as_ref().ok_or_else(|| null("walk"))?;
        let d = out_ref(d, "d")?;
        if !(t >= 0.0 && t.is_finite()) {
            return Err((NilmixStatus::InvalidArgument, format!("t must be finite and >= 0, got {t}")));
        }
        *d = tv_at(&w.space, &point_mass(w.space.len(), 0), t);
        Ok(())
    })
}

/// `t_mix(eps)` from the identity.
///
/// # Safety
/// `w` must be a live walk handle and `t` writable.
#[no_mangle]
pub unsafe extern "C" fn nilmix_walk_mixing_time(w: *const NilmixWalk, eps: f64, t: *mut f64) -> NilmixStatus {
    guard(|| {
        let w = w.as_ref().ok_or_else(|| null("walk"))?;
        let t = out_ref(t, "t")?;
        *t = lift(mixing_time(&w.space, &point_mass(w.space.len(), 0), eps))?;
        Ok(())
    })
}
