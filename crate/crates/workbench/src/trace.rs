//! Line-delimited JSON logs of filter traces.

use std::io::{self, Write};

use serde_json::{Map, Value};

use semicohen_core::generic::FilterTrace;

/// One record per chain position: `{"step":k,"condition":…,"met":[…]}`.
pub fn write_trace<C, W: Write>(out: &mut W, trace: &FilterTrace<C>, to_value: impl Fn(&C) -> Value) -> io::Result<()>
where
    C: Clone + Eq + Ord + std::fmt::Debug,
{
    for (step, p) in trace.chain.iter().enumerate() {
        let mut m = Map::new();
        m.insert("step".into(), Value::from(step));
        m.insert("condition".into(), to_value(p));
        m.insert("met".into(), trace.met_at(step).map(Value::from).collect());
        writeln!(out, "{}", Value::Object(m))?;
    }
    Ok(())
}
