//! Regenerates `fixtures/corpus.masm` from the stock program library.
fn main() {
    print!("{}", masslab::kernel::corpus::write(&masslab::kernel::library::corpus()));
}
