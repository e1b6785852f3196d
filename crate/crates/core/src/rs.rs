//! Systematic Reed-Solomon codes over GF(2^q).
//!
//! Codewords are laid out message first, parity last, and read as a
//! polynomial with the first symbol as the highest-degree coefficient. The
//! generator has the consecutive roots α^1 .. α^(n-k). Decoding is
//! syndrome computation, Berlekamp-Massey, Chien search and Forney's formula,
//! correcting up to t = floor((n-k)/2) symbol errors.

use thiserror::Error;

use crate::gf::{GfError, GfField, GfSymbol};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RsError {
    #[error("RS({n},{k}) violates 0 < k < n")]
    InvalidDimensions { n: usize, k: usize },
    #[error("RS({n},{k}) violates n < 2^q + 2 = {limit} for q = {bits}")]
    NoSuchCode { n: usize, k: usize, bits: u8, limit: usize },
    #[error("RS({n},{k}) over GF({order}) is not a full-length code (need n = {full})")]
    NotFullLength { n: usize, k: usize, order: u32, full: usize },
    #[error("k = {k} does not divide the frame length {frame_len}")]
    FrameNotDivisible { k: usize, frame_len: usize },
    #[error("expected {expected} symbols, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("length {len} is not a multiple of the block length {block}")]
    RaggedFrame { len: usize, block: usize },
    #[error(transparent)]
    Field(#[from] GfError),
}

/// Outcome of decoding one block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecodeStatus {
    /// The block was within distance t of a codeword; carries the number of
    /// symbols corrected.
    Corrected(usize),
    /// Uncorrectable; the received systematic symbols were returned as-is.
    Failed,
}

impl DecodeStatus {
    pub fn is_failed(self) -> bool {
        matches!(self, DecodeStatus::Failed)
    }
}

/// The (n, k) pairs used for GF(8), GF(16) and GF(32).
pub fn standard_params(order: u32) -> Option<(usize, usize)> {
    match order {
        8 => Some((7, 2)),
        16 => Some((15, 5)),
        32 => Some((31, 10)),
        _ => None,
    }
}

/// A validated RS(n, k) code.
#[derive(Clone, Debug)]
pub struct RsCode {
    field: GfField,
    n: usize,
    k: usize,
    t: usize,
    // Monic, highest degree first, length n - k + 1.
    generator: Vec<u16>,
}

/// Checks the existence condition `0 < k < n < 2^q + 2`, that `k` divides
/// `frame_len`, and builds the code.
pub fn validate_params(bits: u8, n: usize, k: usize, frame_len: usize) -> Result<RsCode, RsError> {
    let field = GfField::new(bits)?;
    check_existence(&field, n, k)?;
    if frame_len % k != 0 {
        return Err(RsError::FrameNotDivisible { k, frame_len });
    }
    RsCode::new(field, n, k)
}

fn check_existence(field: &GfField, n: usize, k: usize) -> Result<(), RsError> {
    if !(0 < k && k < n) {
        return Err(RsError::InvalidDimensions { n, k });
    }
    let limit = field.order() as usize + 2;
    if n >= limit {
        return Err(RsError::NoSuchCode { n, k, bits: field.bits(), limit });
    }
    Ok(())
}

impl RsCode {
    /// Builds a full-length code `n = 2^q - 1` over `field`.
    pub fn new(field: GfField, n: usize, k: usize) -> Result<Self, RsError> {
        check_existence(&field, n, k)?;
        let full = field.order() as usize - 1;
        // Extended (n = 2^q, 2^q + 1) and shortened codes are not built.
        if n != full {
            return Err(RsError::NotFullLength { n, k, order: field.order(), full });
        }
        let parity = n - k;
        let mut generator = vec![1u16];
        for i in 1..=parity {
            let root = field.exp_raw(i);
            // g(x) <- g(x) * (x + root)
            let mut next = vec![0u16; generator.len() + 1];
            for (j, &c) in generator.iter().enumerate() {
                next[j] ^= c;
                next[j + 1] ^= field.mul_raw(c, root);
            }
            generator = next;
        }
        Ok(RsCode { field, n, k, t: parity / 2, generator })
    }

    pub fn field(&self) -> &GfField {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn parity_len(&self) -> usize {
        self.n - self.k
    }

    /// Generator coefficients, highest degree first.
    pub fn generator_poly(&self) -> Vec<GfSymbol> {
        self.generator.iter().map(|&c| GfSymbol(c)).collect()
    }

    fn check_symbols(&self, symbols: &[GfSymbol]) -> Result<(), RsError> {
        for &s in symbols {
            self.field.check(s)?;
        }
        Ok(())
    }

    pub fn encode(&self, msg: &[GfSymbol]) -> Result<Vec<GfSymbol>, RsError> {
        if msg.len() != self.k {
            return Err(RsError::LengthMismatch { expected: self.k, actual: msg.len() });
        }
        self.check_symbols(msg)?;
        let mut out = Vec::with_capacity(self.n);
        self.encode_into(msg, &mut out);
        Ok(out)
    }

    // Appends the codeword for `msg` (length k, already validated) to `out`.
    fn encode_into(&self, msg: &[GfSymbol], out: &mut Vec<GfSymbol>) {
        let parity = self.parity_len();
        let mut reg = vec![0u16; parity];
        for &m in msg {
            let feedback = m.0 ^ reg[0];
            reg.copy_within(1.., 0);
            reg[parity - 1] = 0;
            if feedback != 0 {
                for (r, &g) in reg.iter_mut().zip(&self.generator[1..]) {
                    *r ^= self.field.mul_raw(g, feedback);
                }
            }
        }
        out.extend_from_slice(msg);
        out.extend(reg.into_iter().map(GfSymbol));
    }

    /// Syndromes r(α^1) .. r(α^(n-k)).
    pub fn syndromes(&self, word: &[GfSymbol]) -> Result<Vec<GfSymbol>, RsError> {
        if word.len() != self.n {
            return Err(RsError::LengthMismatch { expected: self.n, actual: word.len() });
        }
        self.check_symbols(word)?;
        Ok(self.syndromes_raw(word).into_iter().map(GfSymbol).collect())
    }

    pub fn is_codeword(&self, word: &[GfSymbol]) -> Result<bool, RsError> {
        Ok(self.syndromes(word)?.iter().all(|s| s.0 == 0))
    }

    fn syndromes_raw(&self, word: &[GfSymbol]) -> Vec<u16> {
        (1..=self.parity_len())
            .map(|j| {
                let root = self.field.exp_raw(j);
                word.iter().fold(0u16, |acc, s| self.field.mul_raw(acc, root) ^ s.0)
            })
            .collect()
    }

    pub fn decode(&self, word: &[GfSymbol]) -> Result<(Vec<GfSymbol>, DecodeStatus), RsError> {
        if word.len() != self.n {
            return Err(RsError::LengthMismatch { expected: self.n, actual: word.len() });
        }
        self.check_symbols(word)?;
        let mut out = Vec::with_capacity(self.k);
        let status = self.decode_into(word, &mut out);
        Ok((out, status))
    }

    // Appends the decoded message of `word` (length n, validated) to `out`.
    fn decode_into(&self, word: &[GfSymbol], out: &mut Vec<GfSymbol>) -> DecodeStatus {
        let synd = self.syndromes_raw(word);
        if synd.iter().all(|&s| s == 0) {
            out.extend_from_slice(&word[..self.k]);
            return DecodeStatus::Corrected(0);
        }
        match self.correct(word, &synd) {
            Some((fixed, count)) => {
                out.extend_from_slice(&fixed[..self.k]);
                DecodeStatus::Corrected(count)
            }
            None => {
                out.extend_from_slice(&word[..self.k]);
                DecodeStatus::Failed
            }
        }
    }

    fn correct(&self, word: &[GfSymbol], synd: &[u16]) -> Option<(Vec<GfSymbol>, usize)> {
        let f = &self.field;
        let r = synd.len();
        let locator = berlekamp_massey(f, synd);
        let errors = locator.len() - 1;
        if errors == 0 || errors > self.t {
            return None;
        }

        // Position i has locator X = α^(n-1-i); it is in error iff Λ(X^-1) = 0.
        let nonzero = f.order() as usize - 1;
        let mut positions = Vec::with_capacity(errors);
        for i in 0..self.n {
            let power = self.n - 1 - i;
            let x_inv = f.exp_raw(nonzero - power % nonzero);
            if poly_eval_low(f, &locator, x_inv) == 0 {
                positions.push(i);
            }
        }
        if positions.len() != errors {
            return None;
        }

        // Ω(x) = S(x) Λ(x) mod x^r, lowest degree first.
        let mut omega = vec![0u16; r];
        for (i, &s) in synd.iter().enumerate() {
            for (j, &l) in locator.iter().enumerate() {
                if i + j < r {
                    omega[i + j] ^= f.mul_raw(s, l);
                }
            }
        }

        let mut fixed = word.to_vec();
        for &i in &positions {
            let power = self.n - 1 - i;
            let x_inv = f.exp_raw(nonzero - power % nonzero);
            // Formal derivative keeps only odd-degree terms in characteristic 2.
            let mut deriv = 0u16;
            let mut x_pow = 1u16;
            for (d, &l) in locator.iter().enumerate().skip(1) {
                if d % 2 == 1 {
                    deriv ^= f.mul_raw(l, x_pow);
                }
                x_pow = f.mul_raw(x_pow, x_inv);
            }
            if deriv == 0 {
                return None;
            }
            // First consecutive root α^1 makes the X^(1-fcr) factor vanish.
            let magnitude = f.div_raw(poly_eval_low(f, &omega, x_inv), deriv);
            fixed[i] = GfSymbol(fixed[i].0 ^ magnitude);
        }

        if self.syndromes_raw(&fixed).iter().any(|&s| s != 0) {
            return None;
        }
        Some((fixed, errors))
    }

    /// Encodes a frame block by block; the output has `len * n / k` symbols.
    pub fn encode_frame(&self, frame: &[GfSymbol]) -> Result<Vec<GfSymbol>, RsError> {
        if frame.len() % self.k != 0 {
            return Err(RsError::FrameNotDivisible { k: self.k, frame_len: frame.len() });
        }
        self.check_symbols(frame)?;
        let mut out = Vec::with_capacity(frame.len() / self.k * self.n);
        for block in frame.chunks_exact(self.k) {
            self.encode_into(block, &mut out);
        }
        Ok(out)
    }

    /// Decodes a frame block by block, returning the concatenated messages and
    /// one status per block.
    pub fn decode_frame(
        &self,
        coded: &[GfSymbol],
    ) -> Result<(Vec<GfSymbol>, Vec<DecodeStatus>), RsError> {
        if coded.len() % self.n != 0 {
            return Err(RsError::RaggedFrame { len: coded.len(), block: self.n });
        }
        self.check_symbols(coded)?;
        let blocks = coded.len() / self.n;
        let mut out = Vec::with_capacity(blocks * self.k);
        let mut statuses = Vec::with_capacity(blocks);
        for block in coded.chunks_exact(self.n) {
            statuses.push(self.decode_into(block, &mut out));
        }
        Ok((out, statuses))
    }
}

/// Connection polynomial of the shortest LFSR generating `synd`, lowest
/// degree first, trimmed to its degree.
fn berlekamp_massey(f: &GfField, synd: &[u16]) -> Vec<u16> {
    let r = synd.len();
    let mut c = vec![0u16; r + 1];
    let mut b = vec![0u16; r + 1];
    c[0] = 1;
    b[0] = 1;
    let mut len = 0usize;
    let mut shift = 1usize;
    let mut last_disc = 1u16;

    for step in 0..r {
        let mut disc = synd[step];
        for i in 1..=len {
            disc ^= f.mul_raw(c[i], synd[step - i]);
        }
        if disc == 0 {
            shift += 1;
            continue;
        }
        let scale = f.div_raw(disc, last_disc);
        if 2 * len <= step {
            let prev = c.clone();
            for i in 0..=r - shift {
                c[i + shift] ^= f.mul_raw(scale, b[i]);
            }
            len = step + 1 - len;
            b = prev;
            last_disc = disc;
            shift = 1;
        } else {
            for i in 0..=r - shift {
                c[i + shift] ^= f.mul_raw(scale, b[i]);
            }
            shift += 1;
        }
    }
    c.truncate(len + 1);
    c
}

fn poly_eval_low(f: &GfField, coeffs: &[u16], x: u16) -> u16 {
    coeffs.iter().rev().fold(0u16, |acc, &c| f.mul_raw(acc, x) ^ c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn syms(v: &[u16]) -> Vec<GfSymbol> {
        v.iter().map(|&x| GfSymbol::new(x)).collect()
    }

    #[test]
    fn standard_cells_validate() {
        let c = validate_params(3, 7, 2, 1000).unwrap();
        assert_eq!((c.n(), c.k(), c.t()), (7, 2, 2));
        let c = validate_params(4, 15, 5, 1000).unwrap();
        assert_eq!(c.t(), 5);
        let c = validate_params(5, 31, 10, 1000).unwrap();
        assert_eq!(c.t(), 10);
    }

    #[test]
    fn validation_names_the_failed_constraint() {
        assert_eq!(
            validate_params(3, 7, 3, 1000).unwrap_err(),
            RsError::FrameNotDivisible { k: 3, frame_len: 1000 }
        );
        assert!(matches!(
            validate_params(3, 7, 7, 7),
            Err(RsError::InvalidDimensions { .. })
        ));
        assert!(matches!(
            validate_params(3, 7, 0, 7),
            Err(RsError::InvalidDimensions { .. })
        ));
        assert!(matches!(
            validate_params(3, 10, 2, 10),
            Err(RsError::NoSuchCode { limit: 10, .. })
        ));
        // n = 2^q and 2^q + 1 exist but are extended codes.
        assert!(matches!(
            validate_params(3, 9, 3, 9),
            Err(RsError::NotFullLength { .. })
        ));
        assert!(matches!(
            validate_params(4, 7, 2, 10),
            Err(RsError::NotFullLength { .. })
        ));
    }

    #[test]
    fn generator_has_consecutive_roots() {
        let code = validate_params(4, 15, 5, 5).unwrap();
        let f = code.field();
        let g = code.generator_poly();
        assert_eq!(g.len(), 11);
        assert_eq!(g[0], GfSymbol::ONE);
        for i in 1..=10 {
            let root = f.alpha_pow(i);
            let val = g.iter().fold(GfSymbol::ZERO, |acc, &c| {
                f.add(f.mul(acc, root).unwrap(), c).unwrap()
            });
            assert_eq!(val, GfSymbol::ZERO, "α^{i} is not a root");
        }
    }

    #[test]
    fn zero_message_gives_zero_codeword() {
        let code = validate_params(3, 7, 2, 2).unwrap();
        assert_eq!(code.encode(&syms(&[0, 0])).unwrap(), syms(&[0; 7]));
    }

    #[test]
    fn unit_message_in_rs_7_2() {
        // Frozen from an independent long division of x^6 by
        // g(x) = (x+α)(x+α²)(x+α³)(x+α⁴)(x+α⁵) over GF(8), α³ = α + 1.
        let code = validate_params(3, 7, 2, 2).unwrap();
        assert_eq!(code.generator_poly(), syms(&[1, 4, 3, 5, 6, 2]));
        let cw = code.encode(&syms(&[1, 0])).unwrap();
        assert_eq!(cw, syms(&[1, 0, 5, 2, 4, 7, 3]));
        assert!(code.is_codeword(&cw).unwrap());
    }

    #[test]
    fn clean_codeword_decodes_with_no_corrections() {
        let code = validate_params(4, 15, 5, 5).unwrap();
        let msg = syms(&[1, 2, 3, 4, 5]);
        let cw = code.encode(&msg).unwrap();
        assert_eq!(code.decode(&cw).unwrap(), (msg, DecodeStatus::Corrected(0)));
    }

    #[test]
    fn corrects_up_to_t_errors() {
        let code = validate_params(4, 15, 5, 5).unwrap();
        let msg = syms(&[9, 0, 15, 7, 1]);
        let mut word = code.encode(&msg).unwrap();
        for (pos, e) in [(0, 3), (4, 9), (7, 1), (11, 15), (14, 6)] {
            word[pos] = GfSymbol::new(word[pos].value() ^ e);
        }
        assert_eq!(code.decode(&word).unwrap(), (msg, DecodeStatus::Corrected(5)));
    }

    #[test]
    fn failure_returns_received_systematic_symbols() {
        let code = validate_params(3, 7, 2, 2).unwrap();
        // Weight-3 garbage in an all-zero word: either detected or
        // miscorrected, and the systematic fallback applies on failure.
        let word = syms(&[5, 0, 0, 3, 0, 0, 7]);
        let (msg, status) = code.decode(&word).unwrap();
        if status.is_failed() {
            assert_eq!(msg, syms(&[5, 0]));
        } else {
            let reenc = code.encode(&msg).unwrap();
            assert!(reenc.iter().zip(&word).filter(|(a, b)| a != b).count() <= code.t());
        }
    }

    #[test]
    fn length_errors() {
        let code = validate_params(3, 7, 2, 2).unwrap();
        assert_eq!(
            code.encode(&syms(&[1])).unwrap_err(),
            RsError::LengthMismatch { expected: 2, actual: 1 }
        );
        assert!(code.decode(&syms(&[0; 6])).is_err());
        assert!(code.encode(&syms(&[1, 9])).is_err());
        assert_eq!(
            code.encode_frame(&syms(&[1, 2, 3])).unwrap_err(),
            RsError::FrameNotDivisible { k: 2, frame_len: 3 }
        );
        assert!(matches!(
            code.decode_frame(&syms(&[0; 8])),
            Err(RsError::RaggedFrame { len: 8, block: 7 })
        ));
    }

    #[test]
    fn frame_lengths() {
        let code = validate_params(4, 15, 5, 1000).unwrap();
        let frame: Vec<GfSymbol> = (0..1000).map(|i| GfSymbol::new(i % 16)).collect();
        let coded = code.encode_frame(&frame).unwrap();
        assert_eq!(coded.len(), 3000);
        let (back, statuses) = code.decode_frame(&coded).unwrap();
        assert_eq!(back, frame);
        assert_eq!(statuses.len(), 200);
        assert!(code.encode_frame(&[]).unwrap().is_empty());
    }
}
