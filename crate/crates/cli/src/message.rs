//! Message ingestion: a JSON array of field elements, or raw bytes packed
//! into symbols behind a LEB128 length prefix.

use bitvec::prelude::*;
use hlc_core::{Field, FieldElement};

use crate::CliError;

/// floor(log2 q): every symbol value below 2^bits is a field element.
pub fn bits_per_symbol(q: u32) -> usize {
    (31 - q.leading_zeros()) as usize
}

pub fn read_message(field: &Field, k: usize, content: &[u8]) -> Result<Vec<FieldElement>, CliError> {
    match serde_json::from_slice::<Vec<u64>>(content) {
        Ok(values) => {
            if values.len() != k {
                return Err(CliError::Usage(format!("message has {} symbols, expected {k}", values.len())));
            }
            values
                .into_iter()
                .map(|v| field.element(v).map_err(|e| CliError::Usage(e.to_string())))
                .collect()
        }
        Err(_) => pack(content, field.order(), k)
            .map(|symbols| symbols.into_iter().map(FieldElement::new).collect()),
    }
}

pub fn pack(bytes: &[u8], q: u32, k: usize) -> Result<Vec<u32>, CliError> {
    let b = bits_per_symbol(q);
    let mut payload = Vec::with_capacity(bytes.len() + 10);
    leb128::write::unsigned(&mut payload, bytes.len() as u64).expect("writing to a Vec");
    payload.extend_from_slice(bytes);
    let bits = payload.view_bits::<Msb0>();
    let needed = bits.len().div_ceil(b);
    if needed > k {
        return Err(CliError::Usage(format!(
            "{} bytes need {needed} symbols of {b} bits, the code holds {k}",
            bytes.len()
        )));
    }
    let mut symbols: Vec<u32> = bits
        .chunks(b)
        .map(|c| {
            let mut v = c.load_be::<u32>();
            v <<= b - c.len();
            v
        })
        .collect();
    symbols.resize(k, 0);
    Ok(symbols)
}

pub fn unpack(symbols: &[u32], q: u32) -> Result<Vec<u8>, CliError> {
    let b = bits_per_symbol(q);
    let mut bits: BitVec<u8, Msb0> = BitVec::with_capacity(symbols.len() * b);
    for &s in symbols {
        if s >> b != 0 {
            return Err(CliError::Usage(format!("symbol {s} does not fit in {b} bits")));
        }
        for i in (0..b).rev() {
            bits.push((s >> i) & 1 == 1);
        }
    }
    let bytes = bits.into_vec();
    let mut cursor = bytes.as_slice();
    let len = leb128::read::unsigned(&mut cursor).map_err(|e| CliError::Usage(format!("bad length prefix: {e}")))?;
    let len = usize::try_from(len).map_err(|_| CliError::Usage("length prefix overflows".into()))?;
    if cursor.len() < len {
        return Err(CliError::Usage(format!("length prefix {len} exceeds the {} packed bytes", cursor.len())));
    }
    Ok(cursor[..len].to_vec())
}
