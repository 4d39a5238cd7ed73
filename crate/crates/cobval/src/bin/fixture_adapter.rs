//! Reference adapters for the fixture corpus.
//!
//! Each adapter is a hand-written translation of one fixture paragraph,
//! standing in for generated target code. It speaks the harness protocol:
//! one JSON request on stdin, one JSON response on stdout. The `chann11`
//! fixture additionally ships a `buggy` variant that reproduces an inverted
//! loop condition (`e == 'N'` where the source demands `e != 'Y'`).
//!
//! Usage: fixture-adapter <fixture> [correct|buggy]

use cobval::harness::{AdapterEvent, AdapterRequest};
use cobval::value::parse_decimal;
use serde::Serialize;
use std::collections::{BTreeMap, VecDeque};
use std::io::{BufRead, Write};

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Response {
    program_outputs: BTreeMap<String, String>,
    resource_output_events: Vec<AdapterEvent>,
    status: String,
}

/// Mock FIFOs plus the event log, shared by every adapter.
struct Rt {
    fifos: BTreeMap<usize, VecDeque<BTreeMap<String, String>>>,
    events: Vec<AdapterEvent>,
    occurrences: BTreeMap<usize, usize>,
    outputs: BTreeMap<String, String>,
}

impl Rt {
    fn new(req: &AdapterRequest) -> Rt {
        let mut fifos: BTreeMap<usize, VecDeque<BTreeMap<String, String>>> = BTreeMap::new();
        for seq in &req.mocks {
            let q = fifos.entry(seq.seq_id).or_default();
            for entry in &seq.fifo {
                q.push_back(entry.slot_values.clone());
            }
        }
        Rt {
            fifos,
            events: Vec::new(),
            occurrences: BTreeMap::new(),
            outputs: BTreeMap::new(),
        }
    }

    /// Perform one stubbed external call: record what was sent, consume the
    /// next queued mock entry.
    fn call(&mut self, seq_id: usize, sent: &[(&str, String)]) -> BTreeMap<String, String> {
        let occ = self.occurrences.entry(seq_id).or_insert(0);
        *occ += 1;
        self.events.push(AdapterEvent {
            seq_id,
            occurrence: *occ,
            slot_values: sent
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
        });
        self.fifos
            .get_mut(&seq_id)
            .and_then(|q| q.pop_front())
            .unwrap_or_default()
    }

    fn out(&mut self, name: &str, value: impl Into<String>) {
        self.outputs.insert(name.to_string(), value.into());
    }

    fn finish(self) -> Response {
        Response {
            program_outputs: self.outputs,
            resource_output_events: self.events,
            status: "ok".to_string(),
        }
    }
}

/// Exact decimal: scaled integer plus scale, mirroring BigDecimal usage in
/// translated code.
#[derive(Clone, Copy, Debug)]
struct Dec {
    raw: i128,
    scale: u32,
}

impl Dec {
    const ZERO: Dec = Dec { raw: 0, scale: 0 };

    fn parse(text: &str) -> Dec {
        let (raw, scale) = parse_decimal(text).unwrap_or((0, 0));
        Dec { raw, scale }
    }

    fn add(self, other: Dec) -> Dec {
        let scale = self.scale.max(other.scale);
        Dec {
            raw: rescale(self.raw, self.scale, scale) + rescale(other.raw, other.scale, scale),
            scale,
        }
    }

    fn mul_int(self, k: i128) -> Dec {
        Dec {
            raw: self.raw * k,
            scale: self.scale,
        }
    }

    fn int(self) -> i128 {
        rescale(self.raw, self.scale, 0)
    }

    fn lt_int(self, k: i128) -> bool {
        self.raw < rescale(k, 0, self.scale)
    }

    fn text(self) -> String {
        if self.scale == 0 {
            return self.raw.to_string();
        }
        let neg = self.raw < 0;
        let abs = format!(
            "{:0>width$}",
            self.raw.unsigned_abs().to_string(),
            width = self.scale as usize + 1
        );
        let (i, f) = abs.split_at(abs.len() - self.scale as usize);
        format!("{}{i}.{f}", if neg { "-" } else { "" })
    }
}

fn rescale(raw: i128, from: u32, to: u32) -> i128 {
    use std::cmp::Ordering::*;
    match from.cmp(&to) {
        Equal => raw,
        Less => raw * 10i128.pow(to - from),
        Greater => raw / 10i128.pow(from - to),
    }
}

fn dec_in(req: &AdapterRequest, var: &str) -> Dec {
    req.program_inputs
        .get(var)
        .map(|t| Dec::parse(t))
        .unwrap_or(Dec::ZERO)
}

fn str_in(req: &AdapterRequest, var: &str, len: usize) -> String {
    pad(
        req.program_inputs
            .get(var)
            .cloned()
            .unwrap_or_default(),
        len,
    )
}

fn pad(mut s: String, len: usize) -> String {
    s.truncate(len);
    while s.len() < len {
        s.push(' ');
    }
    s
}

fn mock_int(entry: &BTreeMap<String, String>, key: &str) -> i128 {
    entry
        .get(key)
        .and_then(|t| parse_decimal(t))
        .map(|(raw, scale)| rescale(raw, scale, 0))
        .unwrap_or(0)
}

fn mock_dec(entry: &BTreeMap<String, String>, key: &str) -> Dec {
    entry.get(key).map(|t| Dec::parse(t)).unwrap_or(Dec::ZERO)
}

fn mock_str(entry: &BTreeMap<String, String>, key: &str, len: usize) -> String {
    pad(entry.get(key).cloned().unwrap_or_default(), len)
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let fixture = args.first().cloned().unwrap_or_default();
    let variant = args.get(1).cloned().unwrap_or_else(|| "correct".to_string());

    let stdin = std::io::stdin();
    let mut line = String::new();
    if stdin.lock().read_line(&mut line).unwrap_or(0) == 0 {
        return;
    }
    let req: AdapterRequest = match serde_json::from_str(line.trim()) {
        Ok(r) => r,
        Err(e) => {
            let resp = Response {
                program_outputs: BTreeMap::new(),
                resource_output_events: Vec::new(),
                status: format!("bad request: {e}"),
            };
            println!("{}", serde_json::to_string(&resp).unwrap());
            return;
        }
    };

    let response = match fixture.as_str() {
        "chann11" => chann11(&req, &variant),
        "lgacdb01" => lgacdb01(&req),
        "icscudat" => icscudat(&req),
        "icdbghnp" => icdbghnp(&req),
        "icdbgnp" => icdbgnp(&req),
        "iclogout" => iclogout(&req),
        "lgapdb01" => lgapdb01(&req),
        "lgipvs01" => lgipvs01(&req),
        "icdbgacc" => icdbgacc(&req),
        other => Response {
            program_outputs: BTreeMap::new(),
            resource_output_events: Vec::new(),
            status: format!("unknown fixture {other}"),
        },
    };
    let mut stdout = std::io::stdout();
    let _ = writeln!(stdout, "{}", serde_json::to_string(&response).unwrap());
    let _ = stdout.flush();
}

/// ChannelDrain.firstSentence: the drain loop. The buggy variant carries
/// the inverted while condition `wsExitEarly == "N"`.
fn chann11(req: &AdapterRequest, variant: &str) -> Response {
    let mut rt = Rt::new(req);
    let ws_amount = dec_in(req, "WS-AMOUNT");

    let ws_loop_iterations: i128 = 1;
    let mut ws_exit_early = " ".to_string();
    let mut ws_total = Dec { raw: 0, scale: 2 };
    let mut ws_msg_count: i128 = 0;
    let mut ws_status_text = pad(String::new(), 12);

    let mut ws_cnt: i128 = 1;
    loop {
        let keep_going = if variant == "buggy" {
            ws_cnt <= ws_loop_iterations && ws_exit_early == "N"
        } else {
            ws_cnt <= ws_loop_iterations && ws_exit_early != "Y"
        };
        if !keep_going {
            break;
        }
        let mock = rt.call(0, &[("1:1", ws_cnt.to_string())]);
        let sqlcode = mock_int(&mock, "var:SQLCODE");
        let _ws_qstat = mock_int(&mock, "3:0");
        if sqlcode != 0 {
            ws_exit_early = "Y".to_string();
            ws_status_text = pad("DRAIN-ABORT".to_string(), 12);
        } else {
            ws_total = ws_total.add(ws_amount);
            ws_msg_count += 1;
            ws_status_text = pad("DRAIN-OK".to_string(), 12);
        }
        ws_cnt += 1;
    }
    let ws_final_cnt = ws_cnt;

    rt.call(
        1,
        &[
            ("0:0", "CH01".to_string()),
            ("0:1", ws_msg_count.to_string()),
            ("0:2", ws_total.text()),
            ("0:3", ws_exit_early.clone()),
        ],
    );

    rt.out("wsExitEarly", ws_exit_early);
    rt.out("wsTotal", ws_total.text());
    rt.out("wsMsgCount", ws_msg_count.to_string());
    rt.out("wsFinalCnt", ws_final_cnt.to_string());
    rt.out("wsStatusText", ws_status_text);
    rt.finish()
}

/// CustomerDao.insertCustomer: three-statement allocation chain.
fn lgacdb01(req: &AdapterRequest) -> Response {
    let mut rt = Rt::new(req);
    let ws_req_region = str_in(req, "WS-REQ-REGION", 2);
    let ws_cust_fname = str_in(req, "WS-CUST-FNAME", 10);
    let ws_cust_lname = str_in(req, "WS-CUST-LNAME", 10);

    let ws_return_code;
    let mut ws_customer_num: i128 = 0;
    let mut ws_new_lastnum: i128 = 0;
    let ws_counter_type = "C".to_string();
    let ws_region = ws_req_region;

    let m = rt.call(0, &[("1:1", ws_counter_type.clone())]);
    let ws_lastnum = mock_int(&m, "3:0");
    let mut sqlcode = mock_int(&m, "var:SQLCODE");
    if sqlcode == 0 {
        ws_customer_num = ws_lastnum + 1;
        let m = rt.call(
            1,
            &[
                ("1:1", ws_customer_num.to_string()),
                ("2:1", ws_cust_fname),
                ("3:1", ws_cust_lname),
            ],
        );
        sqlcode = mock_int(&m, "var:SQLCODE");
        if sqlcode == 0 {
            ws_new_lastnum = ws_customer_num;
            let m = rt.call(
                2,
                &[
                    ("1:1", ws_new_lastnum.to_string()),
                    ("2:1", ws_counter_type),
                    ("3:1", ws_region),
                ],
            );
            sqlcode = mock_int(&m, "var:SQLCODE");
            ws_return_code = if sqlcode == 0 { "00" } else { "92" }.to_string();
        } else {
            ws_return_code = "91".to_string();
        }
    } else {
        ws_return_code = "90".to_string();
    }

    rt.out("wsReturnCode", ws_return_code);
    rt.out("wsCustomerNum", ws_customer_num.to_string());
    rt.out("wsNewLastnum", ws_new_lastnum.to_string());
    rt.finish()
}

/// ScreenUpdate.begin: the translation folded the three screen passes into
/// one renderer, so no call sequence maps back; the test run is vacuous.
fn icscudat(req: &AdapterRequest) -> Response {
    let mut rt = Rt::new(req);
    let mut ws_sent_count = 0i128;
    for idx in 1..=3i128 {
        if idx <= 2 {
            ws_sent_count += 1;
        }
    }
    rt.out("wsSentCount", ws_sent_count.to_string());
    rt.finish()
}

/// AccountInquiry.getCustAcc2: fetch plus fee classification.
fn icdbghnp(req: &AdapterRequest) -> Response {
    let mut rt = Rt::new(req);
    let ws_req_accno = dec_in(req, "WS-REQ-ACCNO").int();

    let mut ws_rc;
    let mut ws_msg = pad(String::new(), 24);
    let mut ws_class_name = pad(String::new(), 8);
    let mut ws_fee = Dec { raw: 0, scale: 2 };
    let mut ws_inq_count = 0i128;
    let ws_accno = ws_req_accno;

    let m = rt.call(0, &[("1:1", ws_accno.to_string())]);
    let acc_type = mock_str(&m, "3:0", 1);
    let _acc_bal = mock_dec(&m, "4:0");
    let sqlcode = mock_int(&m, "var:SQLCODE");
    if sqlcode != 0 {
        ws_rc = "01".to_string();
        ws_msg = pad("ACCOUNT NOT FOUND".to_string(), 24);
    } else {
        ws_rc = "00".to_string();
        match acc_type.as_str() {
            "C" => {
                ws_class_name = pad("CHECKING".to_string(), 8);
                ws_fee = Dec { raw: 250, scale: 2 };
            }
            "S" => {
                ws_class_name = pad("SAVINGS".to_string(), 8);
                ws_fee = Dec { raw: 0, scale: 2 };
            }
            "L" => {
                ws_class_name = pad("LOAN".to_string(), 8);
                ws_fee = Dec { raw: 1275, scale: 2 };
            }
            _ => {
                ws_rc = "02".to_string();
                ws_msg = pad("UNKNOWN ACCOUNT CLASS".to_string(), 24);
            }
        }
        ws_inq_count += 1;
    }

    rt.out("wsAccno", ws_accno.to_string());
    rt.out("wsRc", ws_rc);
    rt.out("wsMsg", ws_msg);
    rt.out("wsClassName", ws_class_name);
    rt.out("wsFee", ws_fee.text());
    rt.out("wsInqCount", ws_inq_count.to_string());
    rt.finish()
}

/// GatewayInquiry.getCustAcc2: two-stage fetch plus balance banding.
fn icdbgnp(req: &AdapterRequest) -> Response {
    let mut rt = Rt::new(req);
    let ws_custno = dec_in(req, "WS-CUSTNO").int();

    let ws_rc;
    let mut ws_band = pad(String::new(), 4);
    let ws_band_note;
    let mut ws_lookups = 0i128;

    let m = rt.call(0, &[("1:1", ws_custno.to_string())]);
    let _ws_cust_name = mock_str(&m, "3:0", 12);
    let sql0 = mock_int(&m, "var:SQLCODE");
    if sql0 != 0 {
        ws_rc = "10".to_string();
        ws_band_note = pad("CUSTOMER MISSING".to_string(), 20);
    } else {
        ws_lookups += 1;
        let m = rt.call(1, &[("1:1", ws_custno.to_string())]);
        let ws_acc_bal = mock_dec(&m, "3:0");
        let sql1 = mock_int(&m, "var:SQLCODE");
        if sql1 != 0 {
            ws_rc = "11".to_string();
            ws_band_note = pad("ACCOUNT MISSING".to_string(), 20);
        } else {
            ws_lookups += 1;
            ws_rc = "00".to_string();
            if ws_acc_bal.lt_int(100) {
                ws_band = pad("LOW".to_string(), 4);
                ws_band_note = pad("BASIC SERVICE BAND".to_string(), 20);
            } else if ws_acc_bal.lt_int(10000) {
                ws_band = pad("MID".to_string(), 4);
                ws_band_note = pad("STANDARD BAND".to_string(), 20);
            } else {
                ws_band = pad("HIGH".to_string(), 4);
                ws_band_note = pad("PREMIER BAND".to_string(), 20);
            }
        }
    }

    rt.out("wsRc", ws_rc);
    rt.out("wsBand", ws_band);
    rt.out("wsBandNote", ws_band_note);
    rt.out("wsLookups", ws_lookups.to_string());
    rt.finish()
}

/// SessionGate.logout: staged teardown over the transaction gate.
fn iclogout(req: &AdapterRequest) -> Response {
    let mut rt = Rt::new(req);
    let ws_rc;
    let mut ws_step_count = 0i128;
    let ws_last_step;
    let mut out_user = pad(String::new(), 8);
    let mut out_msg = pad(String::new(), 16);

    let m = rt.call(0, &[]);
    let sess_user = mock_str(&m, "0:1", 8);
    let mut resp = mock_int(&m, "1:0");
    if resp != 0 {
        ws_rc = "10".to_string();
        ws_last_step = pad("READQ".to_string(), 8);
    } else {
        ws_step_count += 1;
        let m = rt.call(1, &[]);
        resp = mock_int(&m, "1:0");
        if resp != 0 {
            ws_rc = "11".to_string();
            ws_last_step = pad("DELETEQ".to_string(), 8);
        } else {
            ws_step_count += 1;
            out_user = sess_user;
            out_msg = pad("SESSION CLOSED".to_string(), 16);
            let m = rt.call(
                2,
                &[("0:1", out_user.clone()), ("0:2", out_msg.clone())],
            );
            resp = mock_int(&m, "1:0");
            if resp != 0 {
                ws_rc = "12".to_string();
                ws_last_step = pad("SEND".to_string(), 8);
            } else {
                ws_step_count += 1;
                ws_rc = "00".to_string();
                ws_last_step = pad("DONE".to_string(), 8);
            }
        }
    }

    rt.out("wsRc", ws_rc);
    rt.out("wsStepCount", ws_step_count.to_string());
    rt.out("wsLastStep", ws_last_step);
    rt.out("outUser", out_user);
    rt.out("outMsg", out_msg);
    rt.finish()
}

/// PolicyDao.insertPolicy: classification, insert, journal, shadow sync.
fn lgapdb01(req: &AdapterRequest) -> Response {
    let mut rt = Rt::new(req);
    let ws_policy_type = str_in(req, "WS-POLICY-TYPE", 1);
    let ws_policy_num = dec_in(req, "WS-POLICY-NUM").int();
    let ws_base_premium = dec_in(req, "WS-BASE-PREMIUM");

    let ws_rc;
    let mut ws_premium = Dec { raw: 0, scale: 2 };
    let ws_note;

    let accepted_insert = |rt: &mut Rt, seq: usize, premium: Dec| {
        rt.call(
            seq,
            &[
                ("1:1", ws_policy_num.to_string()),
                ("2:1", ws_policy_type.clone()),
                ("3:1", premium.text()),
            ],
        );
        // audit journal, then shadow sync; the subprogram may write the
        // sync block back, which the mock models
        rt.call(
            2,
            &[
                ("0:0", "P".to_string()),
                ("0:1", ws_policy_num.to_string()),
                ("0:2", premium.text()),
            ],
        );
        rt.call(
            3,
            &[
                ("0:0", ws_policy_num.to_string()),
                ("0:1", "A".to_string()),
            ],
        );
    };

    match ws_policy_type.as_str() {
        "E" => {
            ws_premium = ws_base_premium.add(Dec { raw: 25, scale: 0 });
            accepted_insert(&mut rt, 0, ws_premium);
            ws_rc = "00".to_string();
            ws_note = pad("ENDOWMENT ACCEPTED".to_string(), 20);
        }
        "H" => {
            ws_premium = ws_base_premium.mul_int(2);
            accepted_insert(&mut rt, 1, ws_premium);
            ws_rc = "00".to_string();
            ws_note = pad("HOUSE ACCEPTED".to_string(), 20);
        }
        _ => {
            ws_rc = "99".to_string();
            ws_note = pad("UNKNOWN POLICY TYPE".to_string(), 20);
        }
    }

    rt.out("wsRc", ws_rc);
    rt.out("wsPremium", ws_premium.text());
    rt.out("wsNote", ws_note);
    rt.finish()
}

/// ShadowService.firstSentence: shadow write or inquiry screen.
fn lgipvs01(req: &AdapterRequest) -> Response {
    let mut rt = Rt::new(req);
    let ws_req_mode = str_in(req, "WS-REQ-MODE", 1);
    let ws_req_id = dec_in(req, "WS-REQ-ID").int();

    let ws_rc;
    let mut ws_shadow_count = 0i128;
    let mut ws_screen_count = 0i128;

    if ws_req_mode == "W" {
        rt.call(
            0,
            &[
                ("0:0", ws_req_id.to_string()),
                ("0:1", "W".to_string()),
                ("0:2", pad("SHADOW WRITE".to_string(), 12)),
            ],
        );
        ws_shadow_count += 1;
        ws_rc = "00".to_string();
    } else {
        rt.call(
            1,
            &[
                ("0:1", ws_req_id.to_string()),
                ("0:2", pad("INQUIRY ONLY".to_string(), 16)),
            ],
        );
        ws_screen_count += 1;
        ws_rc = "04".to_string();
    }

    rt.out("wsRc", ws_rc);
    rt.out("wsShadowCount", ws_shadow_count.to_string());
    rt.out("wsScreenCount", ws_screen_count.to_string());
    rt.finish()
}

/// ExtractAggregator.fetchAccountList: accumulate until the end marker.
fn icdbgacc(req: &AdapterRequest) -> Response {
    let mut rt = Rt::new(req);
    let mut ws_eof_flag = " ".to_string();
    let mut ws_acc_count = 0i128;
    let mut ws_bal_total = Dec { raw: 0, scale: 2 };
    let mut ws_window_note = pad("OPEN WINDOW".to_string(), 16);

    while ws_eof_flag != "Y" {
        let m = rt.call(0, &[]);
        let rec_type = mock_str(&m, "0:0", 1);
        let bal = mock_dec(&m, "0:2");
        if rec_type == "E" {
            ws_eof_flag = "Y".to_string();
            ws_window_note = pad("END MARKER".to_string(), 16);
        } else {
            ws_acc_count += 1;
            ws_bal_total = ws_bal_total.add(bal);
        }
    }

    rt.out("wsEofFlag", ws_eof_flag);
    rt.out("wsAccCount", ws_acc_count.to_string());
    rt.out("wsBalTotal", ws_bal_total.text());
    rt.out("wsWindowNote", ws_window_note);
    rt.finish()
}
