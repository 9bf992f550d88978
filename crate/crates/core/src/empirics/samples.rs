use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::RunSample;
use crate::error::{LabError, Result};

pub const SAMPLES_HEADER: &str = "run_id,seed_stream,evaluations,success,best_fitness";

#[derive(Serialize, Deserialize)]
struct Record {
    run_id: u64,
    seed_stream: u64,
    evaluations: u64,
    success: bool,
    best_fitness: String,
}

fn csv_error(e: csv::Error) -> LabError {
    LabError::Config(format!("raw samples: {e}"))
}

/// Writes one row per run, fitness with six fractional digits.
pub fn write_samples_csv<W: Write>(samples: &[RunSample], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for s in samples {
        w.serialize(Record {
            run_id: s.run_id,
            seed_stream: s.seed_stream,
            evaluations: s.evaluations,
            success: s.success,
            best_fitness: format!("{:.6}", s.best_fitness),
        })
        .map_err(csv_error)?;
    }
    if samples.is_empty() {
        w.write_record(SAMPLES_HEADER.split(','))
            .map_err(csv_error)?;
    }
    w.flush()
        .map_err(|e| LabError::Config(format!("raw samples: {e}")))
}

pub fn read_samples_csv<R: Read>(input: R) -> Result<Vec<RunSample>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(str::to_owned)
        .collect();
    if header.join(",") != SAMPLES_HEADER {
        return Err(LabError::Config(format!(
            "raw samples: expected header `{SAMPLES_HEADER}`, got `{}`",
            header.join(",")
        )));
    }
    r.deserialize::<Record>()
        .map(|rec| {
            let rec = rec.map_err(csv_error)?;
            let best_fitness = rec.best_fitness.parse().map_err(|_| {
                LabError::Config(format!("raw samples: bad fitness `{}`", rec.best_fitness))
            })?;
            Ok(RunSample {
                run_id: rec.run_id,
                seed_stream: rec.seed_stream,
                evaluations: rec.evaluations,
                success: rec.success,
                best_fitness,
            })
        })
        .collect()
}
