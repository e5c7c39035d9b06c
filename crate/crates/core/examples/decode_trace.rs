//! Decodes one noisy N = 8 frame and shows which stages run before each decision.

use polar_sched::channel::{channel_llrs, construct_bhattacharyya, transmit, ChannelModel};
use polar_sched::codec::{encode, DecodeObserver, DecoderState, Domain, ScDecoder};
use polar_sched::schedule::Step;

#[derive(Default)]
struct Trace {
    stages: Vec<String>,
}

impl DecodeObserver for Trace {
    fn entry(&mut self, step: &Step) {
        self.stages.push(step.entry.to_string());
    }

    fn decision(&mut self, i: u64, soft: f64, bit: u8, state: &DecoderState) {
        println!(
            "u{i}: {:<14} llr {soft:>8.3} -> {bit}   decided so far {:?}",
            self.stages.join(" "),
            state.decisions()
        );
        self.stages.clear();
    }
}

fn main() -> polar_sched::Result<()> {
    let spec = construct_bhattacharyya(3, 4, 0.5)?;
    let msg = [1, 0, 1, 1];
    let x = encode(&spec, &msg)?;
    let model = ChannelModel::awgn(0.8)?;
    let llr = channel_llrs(&transmit(&x, model, 4), model);
    println!(
        "info set {:?}, message {msg:?}, codeword {x:?}",
        spec.info_set()
    );
    let u = ScDecoder::new(3, Domain::LlrMinSum)?.decode_observed(
        &spec,
        &llr,
        &mut Trace::default(),
    )?;
    println!("recovered {:?}", spec.extract(&u));
    Ok(())
}
