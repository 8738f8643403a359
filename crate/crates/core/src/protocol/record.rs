// Copyright 2026 The Farsight Developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Line-oriented detection records: `trial<TAB>m<TAB>q<TAB>sign<TAB>seed`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::decode::PhiSign;
use super::simulate::Outcome;
use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectionRecord {
    pub trial: u64,
    pub bin: usize,
    pub mode: usize,
    pub sign: PhiSign,
    pub seed: u64,
}

impl DetectionRecord {
    /// Record for a detection; `None` for other outcomes.
    pub fn from_outcome(trial: u64, seed: u64, outcome: Outcome) -> Option<Self> {
        match outcome {
            Outcome::Detection { bin, mode, sign } => Some(Self { trial, bin, mode, sign, seed }),
            _ => None,
        }
    }
}

impl fmt::Display for DetectionRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}\t{}\t{}\t{}", self.trial, self.bin, self.mode, self.sign.symbol(), self.seed)
    }
}

impl FromStr for DetectionRecord {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self, Error> {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [trial, bin, mode, sign, seed] = fields[..] else {
            return Err(Error::Parse(format!("expected 5 fields, got {}: {line:?}", fields.len())));
        };
        let num = |s: &str, what: &str| s.parse::<u64>().map_err(|e| Error::Parse(format!("{what} {s:?}: {e}")));
        let sign = match sign {
            "+" => PhiSign::Plus,
            "-" => PhiSign::Minus,
            other => return Err(Error::Parse(format!("sign {other:?}"))),
        };
        Ok(Self {
            trial: num(trial, "trial")?,
            bin: num(bin, "bin")? as usize,
            mode: num(mode, "mode")? as usize,
            sign,
            seed: num(seed, "seed")?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let r = DetectionRecord { trial: 42, bin: 3, mode: 1, sign: PhiSign::Minus, seed: 9 };
        let line = r.to_string();
        assert_eq!(line, "42\t3\t1\t-\t9");
        assert_eq!(line.parse::<DetectionRecord>().unwrap(), r);
    }

    #[test]
    fn rejects_garbage() {
        assert!("1 2 3".parse::<DetectionRecord>().is_err());
        assert!("1 2 3 x 5".parse::<DetectionRecord>().is_err());
        assert!("a 2 3 + 5".parse::<DetectionRecord>().is_err());
    }
}
