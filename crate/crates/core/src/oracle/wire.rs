//! JSON-lines batch protocol for out-of-process oracles.
//!
//! ```text
//! request:  {"request_id":"…","image_ref":"…","points":[[x,y],…]}
//! response: {"request_id":"…","masks":[{"rle":"<base64>","score":0.9},…×3],"width":W,"height":H}
//! error:    {"request_id":"…","error":"…","code":"unknown_image"}
//! header:   any object without a request_id (e.g. {"variant":"vit_b"}), ignored
//! ```
//!
//! Responses may arrive in any order; `request_id` is the only link.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine as _;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{rle_decode, rle_encode, MaskOracle, OracleError, OracleRequest, OracleResponse};
use crate::sampling::Point;
use crate::selection::CandidateMaskSet;

pub const CODE_UNKNOWN_IMAGE: &str = "unknown_image";
pub const CODE_MALFORMED_REQUEST: &str = "malformed_request";
pub const CODE_BACKEND: &str = "backend_error";

#[derive(Debug, Serialize, Deserialize)]
struct WireRequest {
    request_id: String,
    image_ref: String,
    points: Vec<[u32; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
struct WireMask {
    rle: String,
    score: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct WireResponse {
    request_id: String,
    masks: Vec<WireMask>,
    width: usize,
    height: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct WireError {
    request_id: Option<String>,
    error: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    code: Option<String>,
}

/// One parsed line of a response stream.
#[derive(Debug, Clone, PartialEq)]
pub enum ResponseLine {
    Response(OracleResponse),
    Error {
        request_id: Option<String>,
        code: Option<String>,
        message: String,
    },
    Header(Value),
}

pub fn encode_request(request: &OracleRequest) -> String {
    serde_json::to_string(&WireRequest {
        request_id: request.request_id.clone(),
        image_ref: request.image_ref.clone(),
        points: request.points.iter().map(|p| [p.x, p.y]).collect(),
    })
    .expect("request serializes")
}

pub fn decode_request(line: &str) -> Result<OracleRequest, OracleError> {
    let w: WireRequest =
        serde_json::from_str(line).map_err(|e| OracleError::MalformedResponse(format!("bad request line: {e}")))?;
    Ok(OracleRequest {
        request_id: w.request_id,
        image_ref: w.image_ref,
        points: w.points.into_iter().map(|[x, y]| Point { x, y }).collect(),
    })
}

pub fn encode_response(response: &OracleResponse) -> String {
    let (w, h) = response.candidates.dims();
    let masks = response
        .candidates
        .candidates()
        .iter()
        .zip(response.candidates.scores())
        .map(|(m, score)| WireMask {
            rle: B64.encode(rle_encode(m)),
            score,
        })
        .collect();
    serde_json::to_string(&WireResponse {
        request_id: response.request_id.clone(),
        masks,
        width: w,
        height: h,
    })
    .expect("response serializes")
}

pub fn encode_error(request_id: Option<&str>, code: &str, message: &str) -> String {
    serde_json::to_string(&WireError {
        request_id: request_id.map(str::to_owned),
        error: message.to_owned(),
        code: Some(code.to_owned()),
    })
    .expect("error serializes")
}

pub fn decode_response_line(line: &str) -> Result<ResponseLine, OracleError> {
    let value: Value =
        serde_json::from_str(line).map_err(|e| OracleError::MalformedResponse(format!("not JSON: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| OracleError::MalformedResponse("line is not an object".into()))?;
    if obj.contains_key("error") {
        let e: WireError = serde_json::from_value(value).map_err(|e| OracleError::MalformedResponse(e.to_string()))?;
        return Ok(ResponseLine::Error {
            request_id: e.request_id,
            code: e.code,
            message: e.error,
        });
    }
    if !obj.contains_key("request_id") {
        return Ok(ResponseLine::Header(value));
    }
    let w: WireResponse = serde_json::from_value(value).map_err(|e| OracleError::MalformedResponse(e.to_string()))?;
    if w.masks.len() != 3 {
        return Err(OracleError::MalformedResponse(format!(
            "request `{}`: expected 3 masks, got {}",
            w.request_id,
            w.masks.len()
        )));
    }
    let mut masks = Vec::with_capacity(3);
    let mut scores = Vec::with_capacity(3);
    for m in w.masks {
        let bytes = B64
            .decode(&m.rle)
            .map_err(|e| OracleError::MalformedResponse(format!("bad base64: {e}")))?;
        masks.push(rle_decode(&bytes, w.width, w.height)?);
        scores.push(m.score);
    }
    Ok(ResponseLine::Response(OracleResponse {
        request_id: w.request_id,
        candidates: CandidateMaskSet::new(masks, scores)?,
    }))
}

/// Pair every request with exactly one response line by id, returning
/// responses in request order.
pub fn match_responses(
    requests: &[OracleRequest],
    lines: impl IntoIterator<Item = String>,
) -> Result<Vec<OracleResponse>, OracleError> {
    let pending: HashMap<&str, &OracleRequest> = requests.iter().map(|r| (r.request_id.as_str(), r)).collect();
    if pending.len() != requests.len() {
        return Err(OracleError::MalformedResponse("duplicate request_id in batch".into()));
    }
    let mut got: HashMap<String, OracleResponse> = HashMap::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        match decode_response_line(&line)? {
            ResponseLine::Header(_) => {}
            ResponseLine::Error {
                request_id,
                code,
                message,
            } => {
                let id = request_id.unwrap_or_default();
                if code.as_deref() == Some(CODE_UNKNOWN_IMAGE) {
                    let image = pending.get(id.as_str()).map(|r| r.image_ref.clone()).unwrap_or(id);
                    return Err(OracleError::UnknownImage(image));
                }
                return Err(OracleError::Backend {
                    request_id: id,
                    message,
                });
            }
            ResponseLine::Response(resp) => {
                if !pending.contains_key(resp.request_id.as_str()) {
                    return Err(OracleError::MalformedResponse(format!(
                        "response for unknown request `{}`",
                        resp.request_id
                    )));
                }
                if got.contains_key(&resp.request_id) {
                    return Err(OracleError::MalformedResponse(format!(
                        "duplicate response for `{}`",
                        resp.request_id
                    )));
                }
                got.insert(resp.request_id.clone(), resp);
            }
        }
    }
    requests
        .iter()
        .map(|r| {
            got.remove(&r.request_id)
                .ok_or_else(|| OracleError::MalformedResponse(format!("no response for `{}`", r.request_id)))
        })
        .collect()
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct ServeStats {
    pub answered: usize,
    pub errors: usize,
}

/// Answer request lines from `input` with `oracle`, one output line per
/// request. Bad requests produce error lines and processing continues.
pub fn serve(oracle: &dyn MaskOracle, input: impl BufRead, mut output: impl Write) -> std::io::Result<ServeStats> {
    let mut stats = ServeStats::default();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let reply = match decode_request(&line) {
            Err(e) => {
                stats.errors += 1;
                let id = serde_json::from_str::<Value>(&line)
                    .ok()
                    .and_then(|v| v.get("request_id")?.as_str().map(str::to_owned));
                encode_error(id.as_deref(), CODE_MALFORMED_REQUEST, &e.to_string())
            }
            Ok(req) => match oracle.query(&req) {
                Ok(resp) => {
                    stats.answered += 1;
                    encode_response(&resp)
                }
                Err(OracleError::UnknownImage(img)) => {
                    stats.errors += 1;
                    encode_error(
                        Some(&req.request_id),
                        CODE_UNKNOWN_IMAGE,
                        &format!("unknown image `{img}`"),
                    )
                }
                Err(e) => {
                    stats.errors += 1;
                    encode_error(Some(&req.request_id), CODE_BACKEND, &e.to_string())
                }
            },
        };
        writeln!(output, "{reply}")?;
        output.flush()?;
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{MockOracle, MockScene};
    use crate::raster::{BinaryMask, Rect};

    fn scene() -> MockScene {
        MockScene::new("img-a", 16, 12, 2).with_shape(1, BinaryMask::from_rect(16, 12, Rect::new(2, 2, 10, 8)))
    }

    fn req(id: &str, image: &str, pts: &[(u32, u32)]) -> OracleRequest {
        OracleRequest {
            request_id: id.into(),
            image_ref: image.into(),
            points: pts.iter().map(|&(x, y)| Point { x, y }).collect(),
        }
    }

    #[test]
    fn request_line_format() {
        let line = encode_request(&req("a:1:0", "img", &[(3, 4), (5, 6)]));
        assert_eq!(
            line,
            r#"{"request_id":"a:1:0","image_ref":"img","points":[[3,4],[5,6]]}"#
        );
        assert_eq!(decode_request(&line).unwrap(), req("a:1:0", "img", &[(3, 4), (5, 6)]));
    }

    #[test]
    fn response_round_trip() {
        let oracle = MockOracle::new([scene()]);
        let resp = oracle.query(&req("x", "img-a", &[(3, 3)])).unwrap();
        let line = encode_response(&resp);
        assert_eq!(decode_response_line(&line).unwrap(), ResponseLine::Response(resp));
    }

    #[test]
    fn serve_then_match_out_of_order() {
        let oracle = MockOracle::new([scene()]);
        let requests = vec![req("r1", "img-a", &[(3, 3)]), req("r2", "img-a", &[(9, 7)])];
        let input: String = requests.iter().map(|r| encode_request(r) + "\n").collect();
        let mut out = Vec::new();
        let stats = serve(&oracle, input.as_bytes(), &mut out).unwrap();
        assert_eq!(stats, ServeStats { answered: 2, errors: 0 });
        let mut lines: Vec<String> = String::from_utf8(out).unwrap().lines().map(str::to_owned).collect();
        lines.reverse();
        lines.insert(0, r#"{"variant":"mock"}"#.to_owned());
        let matched = match_responses(&requests, lines).unwrap();
        assert_eq!(matched[0].request_id, "r1");
        assert_eq!(matched[1], oracle.query(&requests[1]).unwrap());
    }

    #[test]
    fn serve_reports_errors_and_continues() {
        let oracle = MockOracle::new([scene()]);
        let input = format!(
            "{}\nnot json\n{}\n",
            encode_request(&req("u", "nope", &[(1, 1)])),
            encode_request(&req("ok", "img-a", &[(3, 3)]))
        );
        let mut out = Vec::new();
        let stats = serve(&oracle, input.as_bytes(), &mut out).unwrap();
        assert_eq!(stats, ServeStats { answered: 1, errors: 2 });
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        match decode_response_line(lines[0]).unwrap() {
            ResponseLine::Error { request_id, code, .. } => {
                assert_eq!(request_id.as_deref(), Some("u"));
                assert_eq!(code.as_deref(), Some(CODE_UNKNOWN_IMAGE));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            decode_response_line(lines[1]).unwrap(),
            ResponseLine::Error { request_id: None, .. }
        ));
    }

    #[test]
    fn unmatched_ids_are_malformed() {
        let oracle = MockOracle::new([scene()]);
        let requests = vec![req("r1", "img-a", &[(3, 3)])];
        let stray = encode_response(&oracle.query(&req("zz", "img-a", &[(3, 3)])).unwrap());
        assert!(matches!(
            match_responses(&requests, vec![stray]),
            Err(OracleError::MalformedResponse(_))
        ));
        assert!(matches!(
            match_responses(&requests, Vec::<String>::new()),
            Err(OracleError::MalformedResponse(_))
        ));
        let good = encode_response(&oracle.query(&requests[0]).unwrap());
        assert!(matches!(
            match_responses(&requests, vec![good.clone(), good]),
            Err(OracleError::MalformedResponse(_))
        ));
    }

    #[test]
    fn wrong_mask_count_is_malformed() {
        let line = r#"{"request_id":"a","masks":[{"rle":"EA==","score":0.5}],"width":4,"height":4}"#;
        assert!(matches!(
            decode_response_line(line),
            Err(OracleError::MalformedResponse(_))
        ));
    }

    #[test]
    fn unknown_image_error_line_maps_to_unknown_image() {
        let requests = vec![req("r1", "missing.png", &[(3, 3)])];
        let line = encode_error(Some("r1"), CODE_UNKNOWN_IMAGE, "no such image");
        assert!(matches!(
            match_responses(&requests, vec![line]),
            Err(OracleError::UnknownImage(img)) if img == "missing.png"
        ));
    }
}
