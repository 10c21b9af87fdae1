use std::io::{self, ErrorKind, Write};

/// Stdout that stops writing, without error, once the reader goes away.
struct Stdout<W> {
    inner: W,
    closed: bool,
}

impl<W: Write> Write for Stdout<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        if !self.closed {
            match self.inner.write(buf) {
                Err(e) if e.kind() == ErrorKind::BrokenPipe => self.closed = true,
                r => return r,
            }
        }
        Ok(buf.len())
    }

    fn flush(&mut self) -> io::Result<()> {
        if self.closed {
            return Ok(());
        }
        match self.inner.flush() {
            Err(e) if e.kind() == ErrorKind::BrokenPipe => {
                self.closed = true;
                Ok(())
            }
            r => r,
        }
    }
}

fn main() {
    let mut out = Stdout { inner: io::stdout().lock(), closed: false };
    let code = bchyper_cli::run(std::env::args_os(), &mut out, &mut io::stderr().lock());
    let _ = out.flush();
    std::process::exit(code);
}
