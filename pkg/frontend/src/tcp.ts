/** Raw TCP channel speaking length-delimited frames (Node only). */

import net from "node:net";

import { ClientMsg, FrameDecoder, encodeFrame } from "./protocol.js";
import { Channel } from "./session.js";

export class TcpChannel implements Channel {
  onMessage: (msg: unknown) => void = () => {};
  onClose: (err?: Error) => void = () => {};

  private readonly decoder = new FrameDecoder();

  private constructor(private readonly socket: net.Socket) {
    socket.on("data", (chunk: Buffer) => {
      let decoded: unknown[];
      try {
        decoded = this.decoder.feed(new Uint8Array(chunk));
      } catch (err) {
        socket.destroy();
        this.onClose(err as Error);
        return;
      }
      for (const msg of decoded) this.onMessage(msg);
    });
    socket.on("error", (err) => this.onClose(err));
    socket.on("close", () => this.onClose());
  }

  static connect(host: string, port: number): Promise<TcpChannel> {
    return new Promise((resolve, reject) => {
      const socket = net.createConnection({ host, port }, () => {
        socket.off("error", reject);
        resolve(new TcpChannel(socket));
      });
      socket.once("error", reject);
    });
  }

  send(msg: ClientMsg): void {
    this.socket.write(encodeFrame(msg));
  }

  close(): void {
    this.socket.destroy();
  }
}
