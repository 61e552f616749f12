import { defineConfig } from "vitest/config";

export default defineConfig({
  server: {
    // the retrieval service; start it with `jointspace serve`
    proxy: { "/api": "http://127.0.0.1:8765" },
  },
  test: {
    environment: "happy-dom",
  },
});
