//! Snapshots as files named `<uuid>.json` in one directory.
//!
//! A write goes to a temporary file first and is then hard-linked to its
//! final name, which fails instead of overwriting if the name is taken.
//! Readers therefore never see a partial file and ids are never reused.

use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use nodeglass::snapshot::SnapshotId;

const TEMP_PREFIX: &str = ".incoming-";

#[derive(Debug, Clone)]
pub struct Store {
    dir: PathBuf,
}

impl Store {
    /// Create `dir` if needed, check it is writable, and clear temporary
    /// files left by an interrupted write.
    pub fn open(dir: impl Into<PathBuf>) -> io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        for entry in fs::read_dir(&dir)? {
            let entry = entry?;
            if entry.file_name().to_string_lossy().starts_with(TEMP_PREFIX) {
                let _ = fs::remove_file(entry.path());
            }
        }
        let probe = dir.join(format!("{TEMP_PREFIX}probe"));
        File::create(&probe)?.write_all(b"ok")?;
        fs::remove_file(&probe)?;
        Ok(Store { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path_for(&self, id: &SnapshotId) -> PathBuf {
        self.dir.join(format!("{id}.json"))
    }

    /// Store `bytes` under a fresh id.
    pub fn put(&self, bytes: &[u8]) -> io::Result<SnapshotId> {
        let temp_id = SnapshotId::new_v4();
        let temp = self.dir.join(format!("{TEMP_PREFIX}{temp_id}"));
        let result = (|| {
            let mut file = OpenOptions::new().write(true).create_new(true).open(&temp)?;
            file.write_all(bytes)?;
            file.sync_all()?;
            loop {
                let id = SnapshotId::new_v4();
                match fs::hard_link(&temp, self.path_for(&id)) {
                    Ok(()) => return Ok(id),
                    Err(e) if e.kind() == io::ErrorKind::AlreadyExists => continue,
                    Err(e) => return Err(e),
                }
            }
        })();
        let _ = fs::remove_file(&temp);
        result
    }

    pub fn get(&self, id: &SnapshotId) -> io::Result<Option<Vec<u8>>> {
        match fs::read(self.path_for(id)) {
            Ok(bytes) => Ok(Some(bytes)),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// Number of stored snapshots.
    pub fn count(&self) -> io::Result<usize> {
        let mut n = 0;
        for entry in fs::read_dir(&self.dir)? {
            let name = entry?.file_name();
            let name = name.to_string_lossy();
            if let Some(stem) = name.strip_suffix(".json") {
                if stem.parse::<SnapshotId>().is_ok() {
                    n += 1;
                }
            }
        }
        Ok(n)
    }
}
