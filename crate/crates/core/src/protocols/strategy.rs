
use rand::RngCore;

use crate::bits::{BitString, Bits, Subset};
use crate::error::{Error, Result};
use crate::game::{is_win, InputPair};
use crate::linalg::{AmplitudeVector, ProbabilityDistribution};

use super::{
    compressed_pjo_state, decode_and_normalize, majority_decode, majority_encode, pjo_state, plurality_vote,
    quantize_amplitudes, random_guess, sample, zeta_distribution, ClassicalEncoding, DyadicAccuracy,
    HammingBallCodec,
};

/// What Alice sends. Its cost is the payload's qubit or bit count.
#[derive(Clone, Debug, PartialEq)]
pub enum Message {
    Quantum(AmplitudeVector),
    Classical(Bits),
}

impl Message {
    pub fn cost(&self) -> usize {
        match self {
            Message::Quantum(state) => state.num_qubits(),
            Message::Classical(bits) => bits.len(),
        }
    }

    pub fn is_quantum(&self) -> bool {
        matches!(self, Message::Quantum(_))
    }

    fn quantum(&self) -> Result<&AmplitudeVector> {
        match self {
            Message::Quantum(state) => Ok(state),
            Message::Classical(_) => Err(Error::InvalidParameter("expected a quantum message")),
        }
    }

    fn classical(&self) -> Result<&Bits> {
        match self {
            Message::Classical(bits) => Ok(bits),
            Message::Quantum(_) => Err(Error::InvalidParameter("expected a classical message")),
        }
    }
}

/// One execution of a strategy.
#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolRun {
    pub input: InputPair,
    pub cost: usize,
    pub output: BitString,
    pub won: bool,
}

/// A one-way strategy: Alice maps `x` to a message, Bob maps the message
/// and `y` to an `m`-bit answer.
pub trait Strategy: Send + Sync {
    fn name(&self) -> &'static str;

    /// Subset size the strategy is built for.
    fn m(&self) -> usize;

    fn encode(&self, x: &BitString) -> Result<Message>;

    /// Exact distribution of Bob's answer, when it can be computed.
    fn output_distribution(&self, message: &Message, y: &Subset) -> Result<Option<ProbabilityDistribution>>;

    fn decode(&self, message: &Message, y: &Subset, rng: &mut dyn RngCore) -> Result<BitString>;

    fn run(&self, input: &InputPair, rng: &mut dyn RngCore) -> Result<ProtocolRun> {
        if input.y.len() != self.m() {
            return Err(Error::LengthMismatch { expected: self.m(), found: input.y.len() });
        }
        let message = self.encode(&input.x)?;
        let output = self.decode(&message, &input.y, rng)?;
        let won = is_win(&input.x, &input.y, &output)?;
        Ok(ProtocolRun { input: input.clone(), cost: message.cost(), output, won })
    }
}

/// The zero-error quantum strategy; costs `n` qubits.
#[derive(Clone, Debug)]
pub struct PjoStrategy {
    m: usize,
}

impl PjoStrategy {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("m must be positive"));
        }
        Ok(Self { m })
    }
}

impl Strategy for PjoStrategy {
    fn name(&self) -> &'static str {
        "pjo"
    }

    fn m(&self) -> usize {
        self.m
    }

    fn encode(&self, x: &BitString) -> Result<Message> {
        Ok(Message::Quantum(pjo_state(x, self.m)?))
    }

    fn output_distribution(&self, message: &Message, y: &Subset) -> Result<Option<ProbabilityDistribution>> {
        zeta_distribution(message.quantum()?, y).map(Some)
    }

    fn decode(&self, message: &Message, y: &Subset, rng: &mut dyn RngCore) -> Result<BitString> {
        let dist = zeta_distribution(message.quantum()?, y)?;
        Ok(sample(&dist, rng))
    }
}

/// PJO projected onto Hamming weight `<= k` and shipped on
/// `⌈log₂ Σ_{i<=k} C(n,i)⌉` qubits; Bob decompresses before measuring.
#[derive(Clone, Debug)]
pub struct CompressedPjoStrategy {
    m: usize,
    codec: HammingBallCodec,
}

impl CompressedPjoStrategy {
    pub fn new(n: usize, m: usize, k: usize) -> Result<Self> {
        if m == 0 || m > n {
            return Err(Error::InvalidParameter("need 1 <= m <= n"));
        }
        Ok(Self { m, codec: HammingBallCodec::new(n, k)? })
    }

    pub fn codec(&self) -> &HammingBallCodec {
        &self.codec
    }

    /// Bob's view: the message mapped back onto `n` qubits.
    pub fn expand(&self, message: &Message) -> Result<AmplitudeVector> {
        self.codec.decompress(message.quantum()?)
    }
}

impl Strategy for CompressedPjoStrategy {
    fn name(&self) -> &'static str {
        "compressed-pjo"
    }

    fn m(&self) -> usize {
        self.m
    }

    fn encode(&self, x: &BitString) -> Result<Message> {
        let state = compressed_pjo_state(x, self.m, self.codec.k())?;
        Ok(Message::Quantum(self.codec.compress(&state)?))
    }

    fn output_distribution(&self, message: &Message, y: &Subset) -> Result<Option<ProbabilityDistribution>> {
        zeta_distribution(&self.expand(message)?, y).map(Some)
    }

    fn decode(&self, message: &Message, y: &Subset, rng: &mut dyn RngCore) -> Result<BitString> {
        let dist = zeta_distribution(&self.expand(message)?, y)?;
        Ok(sample(&dist, rng))
    }
}

/// Classical simulation of PJO: Alice sends the quantized amplitudes of
/// her `n`-qubit message, Bob outputs the first `z` whose recomputed
/// probability reaches `2^{-m}`.
#[derive(Clone, Debug)]
pub struct ClassicalSimStrategy {
    m: usize,
    accuracy: Option<DyadicAccuracy>,
}

impl ClassicalSimStrategy {
    /// With `accuracy = None` the zero-error accuracy for `q = n` is used.
    pub fn new(m: usize, accuracy: Option<DyadicAccuracy>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("m must be positive"));
        }
        Ok(Self { m, accuracy })
    }

    pub fn accuracy_for(&self, n: usize) -> Result<DyadicAccuracy> {
        match self.accuracy {
            Some(a) => Ok(a),
            None => super::accuracy_for_zero_error(self.m, n),
        }
    }

    fn encoding(&self, message: &Message, n: usize) -> Result<ClassicalEncoding> {
        ClassicalEncoding::from_payload(message.classical()?.clone(), self.accuracy_for(n)?)
    }
}

impl Strategy for ClassicalSimStrategy {
    fn name(&self) -> &'static str {
        "classical-sim"
    }

    fn m(&self) -> usize {
        self.m
    }

    fn encode(&self, x: &BitString) -> Result<Message> {
        let enc = quantize_amplitudes(&pjo_state(x, self.m)?, self.accuracy_for(x.len())?)?;
        Ok(Message::Classical(enc.into_payload()))
    }

    fn output_distribution(&self, message: &Message, y: &Subset) -> Result<Option<ProbabilityDistribution>> {
        let enc = self.encoding(message, y.universe())?;
        let z = super::classical_sim_decode(&enc, y, self.m)?;
        Ok(Some(ProbabilityDistribution::point_mass(z)))
    }

    fn decode(&self, message: &Message, y: &Subset, _rng: &mut dyn RngCore) -> Result<BitString> {
        super::classical_sim_decode(&self.encoding(message, y.universe())?, y, self.m)
    }
}

/// Classical simulation with resampling: Bob rebuilds the (possibly
/// compressed) quantum message from its quantized amplitudes, runs the
/// measurement `repetitions` times and answers with the plurality.
#[derive(Clone, Debug)]
pub struct AmplifiedStrategy {
    source: CompressedPjoStrategy,
    accuracy: DyadicAccuracy,
    repetitions: u64,
}

impl AmplifiedStrategy {
    pub fn new(source: CompressedPjoStrategy, accuracy: DyadicAccuracy, repetitions: u64) -> Result<Self> {
        if repetitions == 0 {
            return Err(Error::InvalidParameter("at least one repetition is required"));
        }
        Ok(Self { source, accuracy, repetitions })
    }

    pub fn repetitions(&self) -> u64 {
        self.repetitions
    }

    /// Per-round outcome distribution Bob samples from.
    pub fn round_distribution(&self, message: &Message, y: &Subset) -> Result<ProbabilityDistribution> {
        let enc = ClassicalEncoding::from_payload(message.classical()?.clone(), self.accuracy)?;
        let rebuilt = decode_and_normalize(&enc)?;
        let expanded = self.source.expand(&Message::Quantum(rebuilt))?;
        zeta_distribution(&expanded, y)
    }
}

impl Strategy for AmplifiedStrategy {
    fn name(&self) -> &'static str {
        "amplified"
    }

    fn m(&self) -> usize {
        self.source.m
    }

    fn encode(&self, x: &BitString) -> Result<Message> {
        let Message::Quantum(state) = self.source.encode(x)? else {
            unreachable!("compressed PJO sends quantum messages")
        };
        Ok(Message::Classical(quantize_amplitudes(&state, self.accuracy)?.into_payload()))
    }

    fn output_distribution(&self, _message: &Message, _y: &Subset) -> Result<Option<ProbabilityDistribution>> {
        Ok(None)
    }

    fn decode(&self, message: &Message, y: &Subset, rng: &mut dyn RngCore) -> Result<BitString> {
        let dist = self.round_distribution(message, y)?;
        plurality_vote(&dist, self.repetitions, rng)
    }
}

/// One bit saying whether `x` is majority ones.
#[derive(Clone, Debug)]
pub struct MajorityStrategy {
    m: usize,
}

impl MajorityStrategy {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("m must be positive"));
        }
        Ok(Self { m })
    }

    fn answer(&self, message: &Message) -> Result<BitString> {
        let bits = message.classical()?;
        if bits.len() != 1 {
            return Err(Error::MalformedPayload("majority message is one bit"));
        }
        Ok(majority_decode(bits.get(0), self.m))
    }
}

impl Strategy for MajorityStrategy {
    fn name(&self) -> &'static str {
        "majority"
    }

    fn m(&self) -> usize {
        self.m
    }

    fn encode(&self, x: &BitString) -> Result<Message> {
        let mut bits = Bits::new();
        bits.push(majority_encode(x));
        Ok(Message::Classical(bits))
    }

    fn output_distribution(&self, message: &Message, _y: &Subset) -> Result<Option<ProbabilityDistribution>> {
        Ok(Some(ProbabilityDistribution::point_mass(self.answer(message)?)))
    }

    fn decode(&self, message: &Message, _y: &Subset, _rng: &mut dyn RngCore) -> Result<BitString> {
        self.answer(message)
    }
}

/// No communication; Bob guesses uniformly.
#[derive(Clone, Debug)]
pub struct RandomGuessStrategy {
    m: usize,
}

impl RandomGuessStrategy {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 || m > crate::bits::MAX_BITS {
            return Err(Error::InvalidParameter("need 1 <= m <= 64"));
        }
        Ok(Self { m })
    }
}

impl Strategy for RandomGuessStrategy {
    fn name(&self) -> &'static str {
        "random-guess"
    }

    fn m(&self) -> usize {
        self.m
    }

    fn encode(&self, _x: &BitString) -> Result<Message> {
        Ok(Message::Classical(Bits::new()))
    }

    fn output_distribution(&self, _message: &Message, _y: &Subset) -> Result<Option<ProbabilityDistribution>> {
        Ok(Some(ProbabilityDistribution::uniform(self.m)))
    }

    fn decode(&self, _message: &Message, _y: &Subset, rng: &mut dyn RngCore) -> Result<BitString> {
        Ok(random_guess(self.m, rng))
    }
}
