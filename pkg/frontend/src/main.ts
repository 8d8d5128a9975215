import { ReviewApi } from "./api.js";
import { ReviewApp } from "./app.js";

const app = new ReviewApp(new ReviewApi(""), document);
void app.start();
