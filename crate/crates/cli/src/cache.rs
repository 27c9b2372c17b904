//! Best-effort on-disk cache for expanded forms.
//!
//! The cache directory is taken from the `RAQMOD_CACHE_DIR` environment
//! variable; when the variable is unset the cache is disabled and every
//! lookup misses. Entries are keyed by the canonical form name together
//! with the expansion order, one file per entry, holding exactly the bytes
//! the `expand` subcommand would print. Replaying a hit therefore preserves
//! the byte-determinism guarantee.
//!
//! Writes go to a uniquely named temporary file in the same directory
//! followed by an atomic rename, so concurrent readers only ever observe a
//! missing entry or a complete one, and concurrent writers race benignly
//! (both produce identical content). Failures to write are swallowed: a
//! broken cache must never break the computation.

use std::fs;
use std::path::PathBuf;
use std::process;
use std::time::{SystemTime, UNIX_EPOCH};

/// Handle to the (possibly disabled) forms cache.
pub struct FormsCache {
    dir: Option<PathBuf>,
}

impl FormsCache {
    /// Reads `RAQMOD_CACHE_DIR`; unset or empty disables the cache.
    pub fn from_env() -> Self {
        let dir = std::env::var_os("RAQMOD_CACHE_DIR")
            .filter(|v| !v.is_empty())
            .map(PathBuf::from);
        FormsCache { dir }
    }

    fn entry_path(&self, name: &str, order: u32) -> Option<PathBuf> {
        let dir = self.dir.as_ref()?;
        // Canonical names contain `:` and `,`; flatten to filename-safe
        // characters. Distinct canonical names stay distinct because the
        // name grammar never produces `_`.
        let safe: String = name
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
            .collect();
        Some(dir.join(format!("{safe}-{order}.json")))
    }

    /// Returns the stored payload for `(name, order)`, or `None` on miss or
    /// on any read problem.
    pub fn lookup(&self, name: &str, order: u32) -> Option<String> {
        fs::read_to_string(self.entry_path(name, order)?).ok()
    }

    /// Stores a payload under `(name, order)`; errors are ignored.
    pub fn store(&self, name: &str, order: u32, payload: &str) {
        let Some(path) = self.entry_path(name, order) else {
            return;
        };
        let Some(dir) = path.parent() else { return };
        if fs::create_dir_all(dir).is_err() {
            return;
        }
        let nanos = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.subsec_nanos())
            .unwrap_or(0);
        let tmp = dir.join(format!(".tmp-{}-{nanos}", process::id()));
        if fs::write(&tmp, payload).is_ok() && fs::rename(&tmp, &path).is_err() {
            let _ = fs::remove_file(&tmp);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cache_in(dir: &std::path::Path) -> FormsCache {
        FormsCache {
            dir: Some(dir.to_path_buf()),
        }
    }

    #[test]
    fn stores_and_replays_payloads() {
        let dir = tempfile::tempdir().unwrap();
        let cache = cache_in(dir.path());
        assert_eq!(cache.lookup("E:1,1", 8), None);
        cache.store("E:1,1", 8, "{\"x\":1}");
        assert_eq!(cache.lookup("E:1,1", 8).as_deref(), Some("{\"x\":1}"));
        // Different order is a different entry.
        assert_eq!(cache.lookup("E:1,1", 9), None);
    }

    #[test]
    fn disabled_cache_always_misses() {
        let cache = FormsCache { dir: None };
        cache.store("delta", 4, "ignored");
        assert_eq!(cache.lookup("delta", 4), None);
    }

    #[test]
    fn entries_leave_no_temporaries_behind() {
        let dir = tempfile::tempdir().unwrap();
        let cache = cache_in(dir.path());
        cache.store("delta", 12, "payload");
        let names: Vec<String> = fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
            .collect();
        assert_eq!(names, vec!["delta-12.json".to_string()]);
    }
}
