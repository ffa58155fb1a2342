//! Simultaneous-message harness.
//!
//! [`run_protocol`] hands every speaking player a [`PlayerView`] of the input,
//! encodes what it returns into a fixed-width bit string, and gives the
//! referee nothing but the resulting [`Transcript`]. Cost is measured on the
//! encoded payloads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::comb::count_width;
use crate::error::{Error, Result};
use crate::matrix::{player_view, InputMatrix, PlayerView};

/// Packed bit string, most significant bit of each byte first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BitString {
    bytes: Vec<u8>,
    len: u64,
}

impl BitString {
    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bit(&self, i: u64) -> bool {
        (self.bytes[(i / 8) as usize] >> (7 - i % 8)) & 1 == 1
    }

    fn push_bits(&mut self, value: u64, width: u32) {
        for b in (0..width).rev() {
            if self.len % 8 == 0 {
                self.bytes.push(0);
            }
            if (value >> b) & 1 == 1 {
                let last = self.bytes.len() - 1;
                self.bytes[last] |= 1 << (7 - self.len % 8);
            }
            self.len += 1;
        }
    }

    fn read_bits(&self, start: u64, width: u32) -> u64 {
        (0..u64::from(width)).fold(0, |acc, i| (acc << 1) | u64::from(self.bit(start + i)))
    }
}

/// Writes every count with width `⌈log₂(max+1)⌉`, in order.
pub fn encode_counts(counts: &[u64], max: u64) -> Result<BitString> {
    let width = count_width(max);
    let mut out = BitString {
        bytes: Vec::with_capacity((counts.len() * width as usize).div_ceil(8)),
        len: 0,
    };
    for &c in counts {
        if c > max {
            return Err(Error::InvalidInput(format!("count {c} exceeds bound {max}")));
        }
        out.push_bits(c, width);
    }
    Ok(out)
}

/// Inverse of [`encode_counts`].
pub fn decode_counts(bits: &BitString, max: u64) -> Result<Vec<u64>> {
    let width = count_width(max);
    if width == 0 {
        return if bits.is_empty() {
            Ok(Vec::new())
        } else {
            Err(Error::CorruptTranscript("nonempty payload with zero width".into()))
        };
    }
    if bits.len() % u64::from(width) != 0 {
        return Err(Error::CorruptTranscript(format!(
            "payload of {} bits is not a multiple of width {width}",
            bits.len()
        )));
    }
    let counts: Vec<u64> = (0..bits.len() / u64::from(width))
        .map(|i| bits.read_bits(i * u64::from(width), width))
        .collect();
    if let Some(c) = counts.iter().find(|&&c| c > max) {
        return Err(Error::CorruptTranscript(format!("count {c} exceeds bound {max}")));
    }
    Ok(counts)
}

/// One player's encoded message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    player: usize,
    payload: BitString,
}

impl Message {
    pub fn new(player: usize, payload: BitString) -> Self {
        Self { player, payload }
    }

    pub fn player(&self) -> usize {
        self.player
    }

    pub fn payload(&self) -> &BitString {
        &self.payload
    }

    pub fn bits(&self) -> u64 {
        self.payload.len()
    }
}

/// Public parameters of a run; the referee knows these and nothing else
/// about the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicParams {
    pub k: usize,
    pub n: usize,
    pub d: u32,
}

/// Everything the referee receives: one message per speaking player.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    protocol: String,
    params: PublicParams,
    messages: Vec<Message>,
}

impl Transcript {
    pub fn new(protocol: impl Into<String>, params: PublicParams, messages: Vec<Message>) -> Self {
        Self {
            protocol: protocol.into(),
            params,
            messages,
        }
    }

    pub fn protocol(&self) -> &str {
        &self.protocol
    }

    pub fn params(&self) -> PublicParams {
        self.params
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    /// Message of player `i`, which must be the `i`-th message.
    pub fn message(&self, i: usize) -> Result<&Message> {
        self.messages
            .get(i.wrapping_sub(1))
            .filter(|m| m.player == i)
            .ok_or(Error::MissingMessage(i))
    }

    pub fn total_bits(&self) -> u64 {
        self.messages.iter().map(Message::bits).sum()
    }

    /// Structured document `{protocol, k, n, d, messages:[{player, counts, bits}]}`.
    pub fn to_document(&self, count_bound: u64) -> Result<TranscriptDocument> {
        let messages = self
            .messages
            .iter()
            .map(|m| {
                Ok(MessageDocument {
                    player: m.player,
                    counts: decode_counts(&m.payload, count_bound)?,
                    bits: m.bits(),
                })
            })
            .collect::<Result<_>>()?;
        Ok(TranscriptDocument {
            protocol: self.protocol.clone(),
            k: self.params.k,
            n: self.params.n,
            d: self.params.d,
            messages,
        })
    }

    pub fn from_document(doc: &TranscriptDocument, count_bound: u64) -> Result<Self> {
        let messages = doc
            .messages
            .iter()
            .map(|m| {
                let payload = encode_counts(&m.counts, count_bound)?;
                if payload.len() != m.bits {
                    return Err(Error::CorruptTranscript(format!(
                        "player {} declares {} bits but its counts encode to {}",
                        m.player,
                        m.bits,
                        payload.len()
                    )));
                }
                Ok(Message::new(m.player, payload))
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            protocol: doc.protocol.clone(),
            params: PublicParams {
                k: doc.k,
                n: doc.n,
                d: doc.d,
            },
            messages,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptDocument {
    pub protocol: String,
    pub k: usize,
    pub n: usize,
    pub d: u32,
    pub messages: Vec<MessageDocument>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessageDocument {
    pub player: usize,
    pub counts: Vec<u64>,
    pub bits: u64,
}

/// Measured and closed-form communication of a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    pub protocol: String,
    pub total_bits: u64,
    pub per_player_bits: Vec<u64>,
    /// Closed form with count width `⌈log₂(bound+1)⌉`.
    pub analytic_bits: u64,
    /// The same closed form written with `⌈log₂ n⌉` bits per count.
    pub log_n_bits: u64,
}

impl CostReport {
    pub fn from_transcript(t: &Transcript, analytic_bits: u64, log_n_bits: u64) -> Self {
        let per_player_bits: Vec<u64> = t.messages.iter().map(Message::bits).collect();
        Self {
            protocol: t.protocol.clone(),
            total_bits: per_player_bits.iter().sum(),
            per_player_bits,
            analytic_bits,
            log_n_bits,
        }
    }
}

/// Whether a run must satisfy the player-count hypothesis under which the
/// referee's answer is guaranteed unique.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlayerMode {
    #[default]
    Strict,
    Reduced,
}

impl std::str::FromStr for PlayerMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(Self::Strict),
            "reduced" => Ok(Self::Reduced),
            other => Err(Error::Parse(format!("unknown mode `{other}`"))),
        }
    }
}

/// A deterministic simultaneous protocol.
///
/// Players `1..=speakers()` each map their view to a list of counts in
/// `0..=count_bound()`; the referee maps the transcript to the output.
pub trait SimultaneousProtocol: Sync {
    type Output;

    fn id(&self) -> &str;

    fn params(&self) -> PublicParams;

    fn speakers(&self) -> usize {
        self.params().k
    }

    /// Public upper bound on every transmitted count.
    fn count_bound(&self) -> u64;

    /// `Err(InsufficientPlayers)` when the uniqueness hypothesis fails.
    fn check_hypothesis(&self) -> Result<()>;

    fn message(&self, view: &PlayerView<'_>) -> Vec<u64>;

    fn referee(&self, transcript: &Transcript) -> Result<Self::Output>;

    fn analytic_bits(&self) -> u64;

    fn log_n_bits(&self) -> u64;

    /// Decoded counts of every message, in player order.
    fn decode_transcript(&self, transcript: &Transcript) -> Result<Vec<Vec<u64>>> {
        if transcript.params() != self.params() || transcript.protocol() != self.id() {
            return Err(Error::CorruptTranscript(
                "transcript belongs to a different protocol instance".into(),
            ));
        }
        if transcript.messages().len() != self.speakers() {
            return Err(Error::MissingMessage(transcript.messages().len() + 1));
        }
        (1..=self.speakers())
            .map(|i| decode_counts(transcript.message(i)?.payload(), self.count_bound()))
            .collect()
    }
}

/// Result of one protocol execution. The referee's verdict is kept separate
/// so the transcript and cost survive an ambiguous or failed recovery.
#[derive(Debug, Clone)]
pub struct Run<O> {
    pub outcome: Result<O>,
    pub transcript: Transcript,
    pub cost: CostReport,
}

impl<O> Run<O> {
    pub fn into_output(self) -> Result<O> {
        self.outcome
    }
}

/// Computes one message per speaker from its view, encodes it, and runs the
/// referee on the transcript alone.
pub fn run_protocol<P: SimultaneousProtocol>(
    protocol: &P,
    m: &InputMatrix,
    mode: PlayerMode,
) -> Result<Run<P::Output>> {
    let params = protocol.params();
    if m.k() != params.k || m.n() != params.n || m.alphabet().size() != params.d {
        return Err(Error::DimensionMismatch(format!(
            "protocol expects {}×{} over Z_{}, matrix is {}×{} over Z_{}",
            params.k,
            params.n,
            params.d,
            m.k(),
            m.n(),
            m.alphabet().size()
        )));
    }
    if mode == PlayerMode::Strict {
        protocol.check_hypothesis()?;
    }
    let bound = protocol.count_bound();
    let messages = (1..=protocol.speakers())
        .into_par_iter()
        .map(|i| {
            let view = player_view(m, i)?;
            let counts = protocol.message(&view);
            Ok(Message::new(i, encode_counts(&counts, bound)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let transcript = Transcript::new(protocol.id(), params, messages);
    let outcome = protocol.referee(&transcript);
    let cost = CostReport::from_transcript(
        &transcript,
        protocol.analytic_bits(),
        protocol.log_n_bits(),
    );
    Ok(Run {
        outcome,
        transcript,
        cost,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn encode_examples() {
        let b = encode_counts(&[0, 3, 1], 4).unwrap();
        assert_eq!(b.len(), 9);
        let bits: Vec<bool> = (0..9).map(|i| b.bit(i)).collect();
        assert_eq!(
            bits,
            vec![false, false, false, false, true, true, false, false, true]
        );
        assert_eq!(encode_counts(&[1, 0, 1], 1).unwrap().len(), 3);
        assert!(encode_counts(&[5], 4).is_err());
        assert!(encode_counts(&[], 4).unwrap().is_empty());
    }

    #[test]
    fn decode_rejects_garbage() {
        let b = encode_counts(&[7, 7], 7).unwrap();
        // width 3 for bound 7, but decoded with bound 4 → width 3 and 7 > 4
        assert!(decode_counts(&b, 4).is_err());
        // 6 bits do not split into width-4 words
        assert!(decode_counts(&b, 8).is_err());
    }

    #[test]
    fn transcript_document_schema() {
        let params = PublicParams { k: 2, n: 3, d: 2 };
        let msgs = vec![
            Message::new(1, encode_counts(&[1, 2, 0], 3).unwrap()),
            Message::new(2, encode_counts(&[3, 0, 0], 3).unwrap()),
        ];
        let t = Transcript::new("eqsolve", params, msgs);
        let doc = t.to_document(3).unwrap();
        let json = serde_json::to_string(&doc).unwrap();
        assert_eq!(
            json,
            r#"{"protocol":"eqsolve","k":2,"n":3,"d":2,"messages":[{"player":1,"counts":[1,2,0],"bits":6},{"player":2,"counts":[3,0,0],"bits":6}]}"#
        );
        let back: TranscriptDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(Transcript::from_document(&back, 3).unwrap(), t);
        let mut bad = back.clone();
        bad.messages[0].bits = 5;
        assert!(Transcript::from_document(&bad, 3).is_err());
        assert!(t.message(3).is_err());
        assert_eq!(t.message(2).unwrap().player(), 2);
    }

    proptest! {
        #[test]
        fn counts_round_trip(max in 0u64..5000, raw in proptest::collection::vec(any::<u64>(), 0..50)) {
            let counts: Vec<u64> = raw.iter().map(|c| if max == 0 { 0 } else { c % (max + 1) }).collect();
            let b = encode_counts(&counts, max).unwrap();
            prop_assert_eq!(b.len(), counts.len() as u64 * u64::from(count_width(max)));
            if max > 0 {
                prop_assert_eq!(decode_counts(&b, max).unwrap(), counts);
            }
        }
    }
}
