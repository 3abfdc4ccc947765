//! Wire format: UTF-8 JSON objects, one per LF-terminated line.

use serde::{Deserialize, Serialize};

use super::BridgeError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Request {
    Info,
    Score {
        id: u64,
        hyp: String,
        #[serde(rename = "ref")]
        reference: String,
    },
    Shutdown,
}

impl Request {
    /// The request as one line, including the trailing LF.
    pub fn to_line(&self) -> String {
        let mut s = serde_json::to_string(self).expect("requests serialize");
        s.push('\n');
        s
    }
}

/// Reply to `{"op":"info"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BridgeInfo {
    pub name: String,
    pub symmetric: bool,
    #[serde(default)]
    pub score_range: Option<[f64; 2]>,
    #[serde(default)]
    pub supports_multi_ref: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Reply {
    Info(BridgeInfo),
    Score { id: u64, score: f64 },
    Error { id: u64, message: String },
}

#[derive(Serialize)]
struct ScoreLine {
    id: u64,
    score: f64,
}

#[derive(Serialize)]
struct ErrorLine<'a> {
    id: u64,
    error: &'a str,
}

impl Reply {
    pub fn parse(line: &str) -> Result<Reply, BridgeError> {
        let value: serde_json::Value =
            serde_json::from_str(line).map_err(|e| BridgeError::MalformedReply(format!("{e}: {line:?}")))?;
        let obj = value
            .as_object()
            .ok_or_else(|| BridgeError::MalformedReply(format!("not an object: {line:?}")))?;
        match obj.get("id") {
            Some(id) => {
                let id = id
                    .as_u64()
                    .ok_or_else(|| BridgeError::MalformedReply(format!("bad id: {line:?}")))?;
                if let Some(score) = obj.get("score") {
                    let score = score
                        .as_f64()
                        .ok_or_else(|| BridgeError::MalformedReply(format!("non-numeric score: {line:?}")))?;
                    Ok(Reply::Score { id, score })
                } else if let Some(err) = obj.get("error") {
                    Ok(Reply::Error {
                        id,
                        message: err.as_str().map_or_else(|| err.to_string(), str::to_owned),
                    })
                } else {
                    Err(BridgeError::MalformedReply(format!(
                        "score reply without score or error: {line:?}"
                    )))
                }
            }
            None => {
                let info: BridgeInfo =
                    serde_json::from_value(value).map_err(|e| BridgeError::MalformedReply(format!("{e}: {line:?}")))?;
                if info.name.is_empty() {
                    return Err(BridgeError::MalformedReply("info reply has an empty name".into()));
                }
                Ok(Reply::Info(info))
            }
        }
    }

    pub fn to_line(&self) -> String {
        let mut s = match self {
            Reply::Info(info) => serde_json::to_string(info),
            Reply::Score { id, score } => serde_json::to_string(&ScoreLine { id: *id, score: *score }),
            Reply::Error { id, message } => serde_json::to_string(&ErrorLine {
                id: *id,
                error: message,
            }),
        }
        .expect("replies serialize");
        s.push('\n');
        s
    }
}
