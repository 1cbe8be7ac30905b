// Copyright 2026 The CQ Authors
// SPDX-License-Identifier: Apache-2.0

use std::sync::{Arc, Mutex};

use crate::handle::Verbosity;

/// Verbosity-gated diagnostic sink shared by host and device contexts.
///
/// Level 1 carries warnings and lifecycle events, level 2 per-operation
/// traces, level 3 statevector dumps after every shot.
#[derive(Debug, Clone, Default)]
pub struct Diagnostics {
    inner: Arc<Mutex<Inner>>,
}

#[derive(Debug, Default)]
struct Inner {
    verbosity: Verbosity,
    echo: bool,
    lines: Vec<String>,
}

impl Diagnostics {
    /// `echo` mirrors every recorded line to stderr.
    pub fn new(echo: bool) -> Self {
        Diagnostics {
            inner: Arc::new(Mutex::new(Inner {
                verbosity: Verbosity::SILENT,
                echo,
                lines: Vec::new(),
            })),
        }
    }

    pub fn set_verbosity(&self, v: Verbosity) {
        self.lock().verbosity = v;
    }

    pub fn verbosity(&self) -> Verbosity {
        self.lock().verbosity
    }

    pub fn enabled(&self, level: u32) -> bool {
        level > 0 && self.lock().verbosity.0 >= level
    }

    pub fn log<F: FnOnce() -> String>(&self, level: u32, msg: F) {
        let mut inner = self.lock();
        if level == 0 || inner.verbosity.0 < level {
            return;
        }
        let line = format!("[cq:{level}] {}", msg());
        if inner.echo {
            eprintln!("{line}");
        }
        inner.lines.push(line);
    }

    /// Everything recorded so far.
    pub fn lines(&self) -> Vec<String> {
        self.lock().lines.clone()
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, Inner> {
        self.inner.lock().unwrap_or_else(|e| e.into_inner())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn higher_levels_are_supersets() {
        let mut prev: Vec<String> = Vec::new();
        for v in 0..4 {
            let d = Diagnostics::new(false);
            d.set_verbosity(Verbosity(v));
            for level in 1..=3 {
                d.log(level, || format!("message {level}"));
            }
            let lines = d.lines();
            assert_eq!(lines.len(), v as usize);
            assert!(prev.iter().all(|l| lines.contains(l)));
            prev = lines;
        }
    }
}
