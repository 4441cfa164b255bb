use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Fail,
    Cap,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Fail => 1,
            Status::Error => 2,
            Status::Cap => 3,
        }
    }

    pub fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Ok
        } else {
            Status::Fail
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Emit {
    Json,
    Text,
}

/// One command's result. Payload keys are merged into the top-level object
/// next to `command` and `status`.
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub command: String,
    pub status: Status,
    pub payload: Map<String, Value>,
}

impl Verdict {
    pub fn new(command: &str, status: Status) -> Self {
        Verdict { command: command.into(), status, payload: Map::new() }
    }

    pub fn error(command: &str, message: &str) -> Self {
        Verdict::new(command, Status::Error).with("error", message)
    }

    pub fn with<T: Serialize>(mut self, key: &str, value: T) -> Self {
        self.set(key, value);
        self
    }

    pub fn set<T: Serialize>(&mut self, key: &str, value: T) {
        let v = serde_json::to_value(value).expect("payload values serialize");
        self.payload.insert(key.into(), v);
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.payload.get(key)
    }

    pub fn to_json(&self) -> Value {
        let mut obj = self.payload.clone();
        obj.insert("command".into(), Value::String(self.command.clone()));
        obj.insert("status".into(), serde_json::to_value(self.status).unwrap());
        Value::Object(obj)
    }

    pub fn render(&self, emit: Emit) -> String {
        match emit {
            Emit::Json => serde_json::to_string_pretty(&self.to_json()).unwrap(),
            Emit::Text => {
                let mut out = String::new();
                if let Value::Object(obj) = self.to_json() {
                    for (k, v) in obj {
                        let shown = match v {
                            Value::String(s) => s,
                            other => other.to_string(),
                        };
                        writeln!(out, "{k}: {shown}").unwrap();
                    }
                }
                out.pop();
                out
            }
        }
    }
}
