//! Ordered reliable byte streams carrying framed messages.

use std::io::{self, BufReader, Read, Write};
use std::net::{Shutdown, TcpStream};
use std::sync::mpsc::{channel, Receiver, Sender};

use thiserror::Error;

use super::wire::{ProtocolMessage, WireError};

#[derive(Debug, Error)]
pub enum TransportError {
    #[error("peer closed the stream")]
    Closed,
    #[error(transparent)]
    Io(io::Error),
    #[error("undecodable frame on the stream: {0}")]
    Wire(WireError),
}

impl From<io::Error> for TransportError {
    fn from(e: io::Error) -> Self {
        match e.kind() {
            io::ErrorKind::UnexpectedEof | io::ErrorKind::BrokenPipe => Self::Closed,
            _ => Self::Io(e),
        }
    }
}

impl From<WireError> for TransportError {
    fn from(e: WireError) -> Self {
        match e {
            WireError::Io(io) => io.into(),
            other => Self::Wire(other),
        }
    }
}

/// A message pipe.
pub trait Transport {
    fn send(&mut self, msg: &ProtocolMessage) -> Result<(), TransportError>;
    fn recv(&mut self) -> Result<ProtocolMessage, TransportError>;
}

/// Write half that can signal end-of-stream to the peer.
pub trait CloseWrite: Write {
    fn close_write(&mut self) -> io::Result<()>;
}

/// Message framing over any byte stream halves.
#[derive(Debug)]
pub struct StreamTransport<R: Read, W: Write> {
    reader: BufReader<R>,
    writer: W,
}

impl<R: Read, W: Write> StreamTransport<R, W> {
    pub fn new(reader: R, writer: W) -> Self {
        Self {
            reader: BufReader::new(reader),
            writer,
        }
    }

    pub fn into_parts(self) -> (BufReader<R>, W) {
        (self.reader, self.writer)
    }
}

impl<R: Read, W: Write> Transport for StreamTransport<R, W> {
    fn send(&mut self, msg: &ProtocolMessage) -> Result<(), TransportError> {
        Ok(msg.write_to(&mut self.writer)?)
    }

    fn recv(&mut self) -> Result<ProtocolMessage, TransportError> {
        Ok(ProtocolMessage::read_from(&mut self.reader)?)
    }
}

/// Receiving half of an in-process byte pipe.
#[derive(Debug)]
pub struct LoopbackReader {
    rx: Receiver<Vec<u8>>,
    buf: Vec<u8>,
    pos: usize,
}

impl Read for LoopbackReader {
    fn read(&mut self, out: &mut [u8]) -> io::Result<usize> {
        while self.pos == self.buf.len() {
            match self.rx.recv() {
                Ok(chunk) => {
                    self.buf = chunk;
                    self.pos = 0;
                }
                // every sender dropped: end of stream
                Err(_) => return Ok(0),
            }
        }
        let n = out.len().min(self.buf.len() - self.pos);
        out[..n].copy_from_slice(&self.buf[self.pos..self.pos + n]);
        self.pos += n;
        Ok(n)
    }
}

/// Sending half of an in-process byte pipe.
#[derive(Debug)]
pub struct LoopbackWriter {
    tx: Option<Sender<Vec<u8>>>,
}

impl Write for LoopbackWriter {
    fn write(&mut self, data: &[u8]) -> io::Result<usize> {
        let tx = self
            .tx
            .as_ref()
            .ok_or_else(|| io::Error::new(io::ErrorKind::BrokenPipe, "writer closed"))?;
        tx.send(data.to_vec())
            .map_err(|_| io::Error::new(io::ErrorKind::BrokenPipe, "reader dropped"))?;
        Ok(data.len())
    }

    fn flush(&mut self) -> io::Result<()> {
        Ok(())
    }
}

impl CloseWrite for LoopbackWriter {
    fn close_write(&mut self) -> io::Result<()> {
        self.tx = None;
        Ok(())
    }
}

/// One end of an in-process duplex pipe.
#[derive(Debug)]
pub struct LoopbackEnd {
    pub reader: LoopbackReader,
    pub writer: LoopbackWriter,
}

impl LoopbackEnd {
    pub fn split(self) -> (LoopbackReader, LoopbackWriter) {
        (self.reader, self.writer)
    }

    pub fn into_transport(self) -> StreamTransport<LoopbackReader, LoopbackWriter> {
        StreamTransport::new(self.reader, self.writer)
    }
}

fn pipe() -> (LoopbackWriter, LoopbackReader) {
    let (tx, rx) = channel();
    (
        LoopbackWriter { tx: Some(tx) },
        LoopbackReader {
            rx,
            buf: Vec::new(),
            pos: 0,
        },
    )
}

/// Two connected ends; bytes written on one are read on the other.
pub fn loopback_pair() -> (LoopbackEnd, LoopbackEnd) {
    let (w_ab, r_ab) = pipe();
    let (w_ba, r_ba) = pipe();
    (
        LoopbackEnd {
            reader: r_ba,
            writer: w_ab,
        },
        LoopbackEnd {
            reader: r_ab,
            writer: w_ba,
        },
    )
}

impl CloseWrite for TcpStream {
    fn close_write(&mut self) -> io::Result<()> {
        match self.shutdown(Shutdown::Write) {
            Err(e) if e.kind() == io::ErrorKind::NotConnected => Ok(()),
            other => other,
        }
    }
}

/// Reader and writer halves of a connected socket.
pub fn split_tcp(stream: TcpStream) -> io::Result<(TcpStream, TcpStream)> {
    stream.set_nodelay(true)?;
    Ok((stream.try_clone()?, stream))
}

pub fn tcp_transport(stream: TcpStream) -> io::Result<StreamTransport<TcpStream, TcpStream>> {
    let (r, w) = split_tcp(stream)?;
    Ok(StreamTransport::new(r, w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::net::TcpListener;

    fn sample() -> Vec<ProtocolMessage> {
        vec![
            ProtocolMessage::syndrome(3, 99, &[1, 0, 1, 1, 0, 1, 1, 1, 0, 1]),
            ProtocolMessage::reveal_request(3, &[5, 9, 200]),
            ProtocolMessage::reveal(3, &[(5, 1), (9, 0), (200, 1)]),
            ProtocolMessage::verify_tag(3, u64::MAX - 7),
            ProtocolMessage::ack(3),
            ProtocolMessage::fail(4),
        ]
    }

    #[test]
    fn loopback_carries_messages_both_ways() {
        let (a, b) = loopback_pair();
        let (mut a, mut b) = (a.into_transport(), b.into_transport());
        for msg in sample() {
            a.send(&msg).unwrap();
            assert_eq!(b.recv().unwrap(), msg);
            b.send(&msg).unwrap();
            assert_eq!(a.recv().unwrap(), msg);
        }
    }

    #[test]
    fn closing_the_writer_ends_the_stream() {
        let (a, b) = loopback_pair();
        let (_, mut w) = a.split();
        let mut t = b.into_transport();
        w.write_all(&ProtocolMessage::ack(1).encode()).unwrap();
        w.close_write().unwrap();
        assert_eq!(t.recv().unwrap(), ProtocolMessage::ack(1));
        assert!(matches!(t.recv(), Err(TransportError::Closed)));
        assert!(w.write(&[1]).is_err());
    }

    #[test]
    fn partial_frame_then_close_is_reported() {
        let (a, b) = loopback_pair();
        let (_, mut w) = a.split();
        let mut t = b.into_transport();
        w.write_all(&ProtocolMessage::verify_tag(1, 5).encode()[..11])
            .unwrap();
        drop(w);
        assert!(matches!(t.recv(), Err(TransportError::Closed)));
    }

    #[test]
    fn garbage_is_a_wire_error() {
        let (a, b) = loopback_pair();
        let (_, mut w) = a.split();
        let mut t = b.into_transport();
        w.write_all(&[0, 0, 0, 0, 42, 0, 0, 0, 0]).unwrap();
        assert!(matches!(
            t.recv(),
            Err(TransportError::Wire(WireError::UnknownKind(42)))
        ));
    }

    #[test]
    fn tcp_carries_messages() {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let server = std::thread::spawn(move || {
            let (stream, _) = listener.accept().unwrap();
            let mut t = tcp_transport(stream).unwrap();
            while let Ok(msg) = t.recv() {
                t.send(&msg).unwrap();
            }
        });
        let mut t = tcp_transport(TcpStream::connect(addr).unwrap()).unwrap();
        for msg in sample() {
            t.send(&msg).unwrap();
            assert_eq!(t.recv().unwrap(), msg);
        }
        let (_, mut w) = t.into_parts();
        w.close_write().unwrap();
        server.join().unwrap();
    }
}
