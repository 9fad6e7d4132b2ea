//! Disk cache for order tables: one file per prime in the bit-exact
//! table format, written atomically (temp file + rename) so concurrent
//! processes sharing a cache directory never observe a torn file.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::time::SystemTime;

use curve_census::arith::PrimeSieve;
use curve_census::curves::OrderTable;

use crate::CliError;

pub struct DiskCache {
    dir: PathBuf,
    budget_bytes: u64,
}

#[derive(Debug)]
pub struct CacheEntry {
    pub path: PathBuf,
    /// Prime parsed back out of the file name, if it is one of ours.
    pub p: Option<u64>,
    pub bytes: u64,
    pub modified: SystemTime,
}

impl DiskCache {
    pub fn open(dir: &Path, budget_bytes: u64) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| {
            CliError::User(format!("cannot create cache dir {}: {e}", dir.display()))
        })?;
        Ok(DiskCache { dir: dir.to_path_buf(), budget_bytes })
    }

    pub fn table_path(&self, p: u64) -> PathBuf {
        self.dir.join(format!("order_p{p}.eot"))
    }

    /// Read the cached table for `p`, or build and atomically persist
    /// it. A malformed or mismatched file is rebuilt with a warning —
    /// cache loss is never an error. Safe to call from several threads
    /// or processes at once; a warm read never touches the file.
    pub fn get_or_build(&self, p: u64) -> curve_census::Result<OrderTable> {
        let path = self.table_path(p);
        if path.exists() {
            match File::open(&path)
                .map_err(curve_census::Error::from)
                .and_then(|f| OrderTable::read_from(BufReader::new(f)))
            {
                Ok(table) if table.p() == p => return Ok(table),
                Ok(table) => log::warn!(
                    "cache file {} holds p = {}, expected {p}; rebuilding",
                    path.display(),
                    table.p()
                ),
                Err(e) => log::warn!("cache file {} unreadable ({e}); rebuilding", path.display()),
            }
        }
        let table = OrderTable::build_with_budget(p, self.budget_bytes)?;
        let tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        table.write_to(BufWriter::new(tmp.as_file()))?;
        tmp.persist(&path).map_err(|e| e.error)?;
        log::info!("built order table for p = {p} at {}", path.display());
        Ok(table)
    }

    /// Build every table for primes `3 < p <= pmax`; returns the primes
    /// processed.
    pub fn warm(&self, pmax: u64) -> Result<Vec<u64>, CliError> {
        if pmax < 5 {
            return Err(CliError::User("cache warm needs --pmax >= 5".into()));
        }
        let sieve = PrimeSieve::new(pmax).map_err(CliError::from)?;
        let primes: Vec<u64> = sieve.primes().iter().copied().filter(|&p| p > 3).collect();
        for &p in &primes {
            self.get_or_build(p)?;
        }
        Ok(primes)
    }

    pub fn entries(&self) -> Result<Vec<CacheEntry>, CliError> {
        let mut entries = Vec::new();
        let reader = std::fs::read_dir(&self.dir)
            .map_err(|e| CliError::User(format!("cannot list {}: {e}", self.dir.display())))?;
        for item in reader {
            let item = item.map_err(|e| CliError::Internal(e.to_string()))?;
            let meta = item.metadata().map_err(|e| CliError::Internal(e.to_string()))?;
            if !meta.is_file() {
                continue;
            }
            let name = item.file_name().to_string_lossy().into_owned();
            let p = name
                .strip_prefix("order_p")
                .and_then(|rest| rest.strip_suffix(".eot"))
                .and_then(|digits| digits.parse().ok());
            entries.push(CacheEntry {
                path: item.path(),
                p,
                bytes: meta.len(),
                modified: meta.modified().unwrap_or(SystemTime::UNIX_EPOCH),
            });
        }
        entries.sort_by_key(|e| (e.p, e.path.clone()));
        Ok(entries)
    }

    /// Drop oldest-modified table files until the cache is at most
    /// `max_bytes`. Returns (files removed, bytes freed). Files that are
    /// not order tables are left alone.
    pub fn gc(&self, max_bytes: u64) -> Result<(u64, u64), CliError> {
        let mut entries = self.entries()?;
        entries.retain(|e| e.p.is_some());
        let mut total: u64 = entries.iter().map(|e| e.bytes).sum();
        entries.sort_by_key(|e| e.modified);
        let mut removed = 0;
        let mut freed = 0;
        for entry in entries {
            if total <= max_bytes {
                break;
            }
            std::fs::remove_file(&entry.path)
                .map_err(|e| CliError::Internal(format!("gc {}: {e}", entry.path.display())))?;
            total -= entry.bytes;
            freed += entry.bytes;
            removed += 1;
        }
        Ok((removed, freed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn cold_then_warm_reads_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = DiskCache::open(dir.path(), 1 << 20).unwrap();
        let cold = cache.get_or_build(13).unwrap();
        let mtime = std::fs::metadata(cache.table_path(13)).unwrap().modified().unwrap();
        let warm = cache.get_or_build(13).unwrap();
        assert_eq!(cold.entries(), warm.entries());
        // Warm read leaves the file untouched.
        assert_eq!(
            mtime,
            std::fs::metadata(cache.table_path(13)).unwrap().modified().unwrap()
        );
    }

    #[test]
    fn corrupt_files_are_rebuilt() {
        let dir = tempfile::tempdir().unwrap();
        let cache = DiskCache::open(dir.path(), 1 << 20).unwrap();
        cache.get_or_build(11).unwrap();
        // Truncate the file mid-payload.
        let path = cache.table_path(11);
        let bytes = std::fs::read(&path).unwrap();
        std::fs::File::create(&path).unwrap().write_all(&bytes[..bytes.len() / 2]).unwrap();
        let rebuilt = cache.get_or_build(11).unwrap();
        assert_eq!(rebuilt.p(), 11);
        // The file is whole again.
        assert_eq!(std::fs::read(&path).unwrap(), bytes);
    }

    #[test]
    fn warm_ls_gc_lifecycle() {
        let dir = tempfile::tempdir().unwrap();
        let cache = DiskCache::open(dir.path(), 1 << 20).unwrap();
        let primes = cache.warm(20).unwrap();
        assert_eq!(primes, vec![5, 7, 11, 13, 17, 19]);
        let entries = cache.entries().unwrap();
        assert_eq!(entries.len(), 6);
        assert!(entries.iter().all(|e| e.p.is_some() && e.bytes > 0));

        let (removed, freed) = cache.gc(0).unwrap();
        assert_eq!(removed, 6);
        assert!(freed > 0);
        assert!(cache.entries().unwrap().is_empty());
    }

    #[test]
    fn budget_violations_surface_as_errors() {
        let dir = tempfile::tempdir().unwrap();
        let cache = DiskCache::open(dir.path(), 64).unwrap();
        assert!(matches!(
            cache.get_or_build(101),
            Err(curve_census::Error::TableBudget { p: 101, .. })
        ));
    }
}
