//! Node events emitted by the search for audit tooling.

use std::io::Write;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum TraceEvent {
    Enter {
        node: u64,
        parent: Option<u64>,
        depth: usize,
        classes: String,
        bound: Option<f64>,
    },
    /// Node bound exceeded the incumbent.
    PruneStandard {
        node: u64,
        classes: String,
        bound: Option<f64>,
        p_bar: f64,
    },
    /// Successor tests passed during the relaxation. `regions` lists the
    /// class strings of every discarded region.
    PruneSimultaneous {
        node: u64,
        whole: bool,
        regions: Vec<String>,
        fixed_to_zero: Vec<usize>,
        fixed_to_one: Vec<usize>,
        p_bar: f64,
    },
    Branch {
        node: u64,
        index: usize,
        zero_child: u64,
        one_child: u64,
    },
    IncumbentUpdate {
        node: u64,
        p_bar: f64,
        support: Vec<usize>,
    },
}

pub trait TraceSink {
    fn record(&mut self, event: &TraceEvent);
}

impl TraceSink for Vec<TraceEvent> {
    fn record(&mut self, event: &TraceEvent) {
        self.push(event.clone());
    }
}

/// Writes one JSON object per line. The first write error is kept and
/// later events are dropped.
pub struct JsonLines<W: Write> {
    out: W,
    error: Option<std::io::Error>,
}

impl<W: Write> JsonLines<W> {
    pub fn new(out: W) -> Self {
        Self { out, error: None }
    }

    pub fn finish(mut self) -> std::io::Result<W> {
        if let Some(e) = self.error.take() {
            return Err(e);
        }
        self.out.flush()?;
        Ok(self.out)
    }
}

impl<W: Write> TraceSink for JsonLines<W> {
    fn record(&mut self, event: &TraceEvent) {
        if self.error.is_some() {
            return;
        }
        let res = serde_json::to_writer(&mut self.out, event)
            .map_err(std::io::Error::from)
            .and_then(|_| self.out.write_all(b"\n"));
        if let Err(e) = res {
            self.error = Some(e);
        }
    }
}

/// Whether a region given by its class string contains a point with the
/// given support.
pub fn region_contains(classes: &str, support: &[usize]) -> bool {
    classes.chars().enumerate().all(|(i, c)| {
        let active = support.binary_search(&i).is_ok();
        match c {
            '0' => !active,
            '1' => active,
            _ => true,
        }
    })
}
