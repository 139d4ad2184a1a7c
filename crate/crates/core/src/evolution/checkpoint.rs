//! On-disk records of a run: the per-generation archive CSV and one JSON-lines
//! checkpoint per generation holding every individual.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::engine::{Generation, GenerationStats};
use crate::bt::serialize_compact;

/// One individual as stored in a checkpoint file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckpointRecord {
    pub generation: usize,
    pub slot: usize,
    /// Single-line tree text.
    pub tree: String,
    pub per_run_fitness: Vec<f64>,
    pub fitness: f64,
    pub size: usize,
}

/// Writes `gen_NNNN.jsonl` files into a directory.
#[derive(Clone, Debug)]
pub struct CheckpointWriter {
    dir: PathBuf,
}

impl CheckpointWriter {
    pub fn new(dir: impl Into<PathBuf>) -> io::Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(CheckpointWriter { dir })
    }

    pub fn path_for(&self, generation: usize) -> PathBuf {
        self.dir.join(format!("gen_{generation:04}.jsonl"))
    }

    pub fn write(&self, generation: &Generation) -> io::Result<PathBuf> {
        let path = self.path_for(generation.index);
        let mut out = BufWriter::new(File::create(&path)?);
        for (slot, ind) in generation.population.iter().enumerate() {
            let rec = CheckpointRecord {
                generation: generation.index,
                slot,
                tree: serialize_compact(&ind.tree),
                per_run_fitness: ind.per_run.iter().map(|r| r.fitness).collect(),
                fitness: ind.fitness,
                size: ind.size,
            };
            serde_json::to_writer(&mut out, &rec)?;
            out.write_all(b"\n")?;
        }
        out.flush()?;
        Ok(path)
    }
}

pub fn read_checkpoint(path: &Path) -> io::Result<Vec<CheckpointRecord>> {
    let reader = BufReader::new(File::open(path)?);
    let mut records = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("line {}: {e}", n + 1)))?;
        records.push(rec);
    }
    Ok(records)
}

/// Appends one row per generation, flushing each so a partial run leaves a
/// readable file.
pub struct ArchiveWriter {
    inner: csv::Writer<File>,
}

impl ArchiveWriter {
    pub fn create(path: &Path) -> io::Result<Self> {
        let inner = csv::Writer::from_writer(File::create(path)?);
        Ok(ArchiveWriter { inner })
    }

    pub fn append(&mut self, stats: &GenerationStats) -> io::Result<()> {
        self.inner.serialize(stats).map_err(io::Error::from)?;
        self.inner.flush()
    }
}

pub fn read_archive_csv(path: &Path) -> io::Result<Vec<GenerationStats>> {
    let mut reader = csv::Reader::from_path(path).map_err(io::Error::from)?;
    reader
        .deserialize()
        .collect::<Result<Vec<_>, _>>()
        .map_err(io::Error::from)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn archive_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("archive.csv");
        let rows = vec![
            GenerationStats {
                generation: 0,
                best_fitness: 0.5,
                mean_fitness: 0.25,
                best_size: 12,
                mean_size: 80.5,
            },
            GenerationStats {
                generation: 1,
                best_fitness: 1.0,
                mean_fitness: 0.3,
                best_size: 9,
                mean_size: 70.0,
            },
        ];
        let mut w = ArchiveWriter::create(&path).unwrap();
        for r in &rows {
            w.append(r).unwrap();
        }
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("gen,best_f,mean_f,best_size,mean_size\n0,0.5,0.25,12,80.5\n"));
        assert_eq!(read_archive_csv(&path).unwrap(), rows);
    }
}
